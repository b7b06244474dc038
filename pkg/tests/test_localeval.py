"""Local evaluation: completion handles, exact decisions, witnesses, UR(t)."""

import pytest

from gffdecide.errors import CharTwo
from gffdecide.funcfield import RationalPlace, rational_places
from gffdecide.localeval import (
    check_ur,
    completion_handle,
    decide_quadform,
    decide_univar,
    eval_exist_local,
    make_ur_violation,
)
from gffdecide.sentences import normalize, parse_sentence
from gffdecide.series import LaurentSeries


def handle_at(F, name, prec=40):
    for d in (1, 2):
        for bp in rational_places(F.field, d):
            if repr(bp) == name:
                return completion_handle(F, F.places_above(bp)[0], prec)
    raise KeyError(name)


def exist_system(text):
    systems, _ = normalize(parse_sentence(text))
    return systems[0]


# -- completion handles -----------------------------------------------------


def test_handle_curve_relation(corpus_fields):
    for name in ("sqrt-t-f5", "elliptic-f5", "artin-schreier-f2"):
        F = corpus_fields[name]
        for bp in rational_places(F.field, 1):
            for cp in F.places_above(bp):
                h = completion_handle(F, cp)
                assert h.e == cp.e and h.f_res == cp.f_res
                assert h.FQ.order == F.field.order**h.f_res


def test_handle_t_valuation(rational_f5):
    h = handle_at(rational_f5, "(T)")
    assert h.t_image.valuation() == 1
    h = handle_at(rational_f5, "oo")
    assert h.t_image.valuation() == -1
    h = handle_at(rational_f5, "(T + 1)")
    assert h.t_image.valuation() == 0


def test_handle_ramified_place(corpus_fields):
    S = corpus_fields["sqrt-t-f5"]
    h = handle_at(S, "(T)")
    assert h.e == 2
    # t is the square of the curve generator, so v(t) = 2 here
    assert h.t_image.valuation() == 2


def test_handle_inert_place(corpus_fields):
    S = corpus_fields["sqrt-t-f5"]
    h = handle_at(S, "(T + 2)")  # 2 is a nonsquare mod 5
    assert h.f_res == 2 and h.FQ.order == 25


# -- decide_univar ----------------------------------------------------------


def test_decide_univar_sqrt_t(rational_f5):
    expected = {"(T)": False, "(T + 1)": True, "(T + 2)": False, "oo": False}
    for name, want in expected.items():
        h = handle_at(rational_f5, name)
        coeffs = [-h.t_image, LaurentSeries.zero(h.FQ), LaurentSeries.one(h.FQ)]
        assert decide_univar(coeffs, h) == want, name


def test_decide_univar_constants(rational_f5):
    h = handle_at(rational_f5, "(T)")
    one = LaurentSeries.one(h.FQ)
    four = LaurentSeries.constant(h.FQ, h.FQ.scalar(4))
    three = LaurentSeries.constant(h.FQ, h.FQ.scalar(3))
    # y^2 = 4 solvable, y^2 = 3 not (3 is a nonsquare mod 5)
    assert decide_univar([-four, LaurentSeries.zero(h.FQ), one], h) is True
    assert decide_univar([-three, LaurentSeries.zero(h.FQ), one], h) is False


# -- decide_quadform --------------------------------------------------------


def test_quadform_oracles(rational_f5):
    h = handle_at(rational_f5, "(T)")
    one = LaurentSeries.one(h.FQ)
    two = LaurentSeries.constant(h.FQ, h.FQ.scalar(2))
    four = LaurentSeries.constant(h.FQ, h.FQ.scalar(4))
    t = h.t_image
    assert decide_quadform([one, one, one], h) is True  # Chevalley-Warning
    assert decide_quadform([one, two], h) is False  # -1/2 is a nonsquare
    assert decide_quadform([one, four], h) is True  # -1/4 = 1 is a square
    assert decide_quadform([one, two, t, two * t], h) is False  # quaternion form
    assert decide_quadform([one, one, one, t, two * t], h) is True


def test_quadform_char2_refuses(corpus_fields):
    AS = corpus_fields["artin-schreier-f2"]
    h = handle_at(AS, "(T + 1)")
    one = LaurentSeries.one(h.FQ)
    with pytest.raises(CharTwo):
        decide_quadform([one, one, one], h)


# -- eval_exist_local -------------------------------------------------------


def test_exist_witness_and_refutation(rational_f5):
    system = exist_system("(exists (y) (= (- (^ y 2) t) 0))")
    hT = handle_at(rational_f5, "(T)")
    v = eval_exist_local(system, hT)
    assert v.is_false and v.certificate  # valuation-parity refutation
    h1 = handle_at(rational_f5, "(T + 1)")
    v = eval_exist_local(system, h1)
    assert v.is_true
    assert v.certificate.revalidate(h1)
    assert v.certificate.contact >= 2 * v.certificate.minor_val + 1


def test_exist_closed_atoms(rational_f5):
    h = handle_at(rational_f5, "(T)")
    assert eval_exist_local(exist_system("(exists (y) (= (- (* 0 y) 1) 0))"), h).is_false
    assert eval_exist_local(exist_system("(exists (y) (= y 0))"), h).is_true


def test_exist_disjunction(rational_f5):
    h = handle_at(rational_f5, "(T)")
    system = exist_system("(exists (y) (or (= (- (^ y 2) t) 0) (= (- y 1) 0)))")
    assert eval_exist_local(system, h).is_true


def test_exist_two_variables(rational_f5):
    h = handle_at(rational_f5, "(T)")
    system = exist_system("(exists (y z) (= (- (+ (^ y 2) (^ z 2)) t) 0))")
    assert eval_exist_local(system, h).is_true


def test_exist_deep_place(rational_f5):
    # a degree-3 place where t is a square: root search must still certify
    F = rational_f5
    system = exist_system("(exists (y) (= (- (^ y 2) t) 0))")
    seen_true = seen_false = False
    for bp in rational_places(F.field, 3):
        h = completion_handle(F, F.places_above(bp)[0])
        v = eval_exist_local(system, h)
        assert v.outcome in ("True", "False")
        seen_true |= v.is_true
        seen_false |= v.is_false
        if seen_true and seen_false:
            break
    assert seen_true and seen_false


# -- UR(t) ------------------------------------------------------------------


def test_check_ur_rational_all_true(rational_f5):
    for bp in rational_places(rational_f5.field, 1):
        for cp in rational_f5.places_above(bp):
            assert check_ur(completion_handle(rational_f5, cp)).is_true


def test_check_ur_elliptic_ramified(corpus_fields):
    E = corpus_fields["elliptic-f5"]
    for cp in E.ramified_places():
        h = completion_handle(E, cp)
        v = check_ur(h)
        if cp.base.is_infinite:
            # v(t) = -2 is prime to p = 5, so UR survives at infinity
            assert v.is_true
            continue
        assert v.is_false
        s, r = v.certificate["s"], v.certificate["r"]
        w = (h.t_image - s**5) * r * r
        assert r.valuation() < 0
        assert w.indistinguishable_from_zero() or w.valuation() >= 0


def test_check_ur_wild_infinite_place(corpus_fields):
    AS = corpus_fields["artin-schreier-f2"]
    inf = RationalPlace.infinity(AS.field)
    h = completion_handle(AS, AS.places_above(inf)[0])
    assert check_ur(h).is_true


def test_make_ur_violation(rational_f5):
    h = handle_at(rational_f5, "(T + 1)")
    ext = make_ur_violation(h)
    assert ext.e == 2 * h.e
    v = check_ur(ext)
    assert v.is_false
    s, r = v.certificate["s"], v.certificate["r"]
    w = (ext.t_image - s**5) * r * r
    assert r.valuation() < 0
    assert w.indistinguishable_from_zero() or w.valuation() >= 0
