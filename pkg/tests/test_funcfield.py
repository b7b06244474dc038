"""Function fields: curve parsing, places, ramification, residue spectra."""

import pytest

from gffdecide.errors import CurveParseError, ReducibleCurve
from gffdecide.ffield import ff_make
from gffdecide.funcfield import (
    FunctionField,
    RationalPlace,
    completion_embed,
    rational_places,
)


def test_parse_rejects_garbage(F5):
    for bad in ("x -", "x ** t", "", "x + (t"):
        with pytest.raises(CurveParseError):
            FunctionField.from_text(F5, bad)


def test_parse_rejects_reducible(F5):
    with pytest.raises(ReducibleCurve):
        FunctionField.from_text(F5, "x^2 - t^2")


def test_rational_places_counts(F2, F3, F5):
    # q + 1 places of degree 1 (finite ones plus infinity)
    assert len(rational_places(F2, 1)) == 3
    assert len(rational_places(F3, 1)) == 4
    assert len(rational_places(F5, 1)) == 6
    # degree 2: the monic irreducible quadratics only
    assert len(rational_places(F5, 2)) == 10


def test_rational_place_identity(F5):
    inf = RationalPlace.infinity(F5)
    assert inf.is_infinite
    finite = [bp for bp in rational_places(F5, 1) if not bp.is_infinite]
    assert len(finite) == 5
    assert len({bp.key() for bp in rational_places(F5, 1)}) == 6


def test_places_above_sum_identity(corpus_fields):
    for name, F in corpus_fields.items():
        for d in (1, 2):
            for bp in rational_places(F.field, d):
                cps = F.places_above(bp)
                assert sum(cp.e * cp.f_res for cp in cps) == F.d_x, (name, bp)


def test_places_above_cached(rational_f5):
    bp = rational_places(rational_f5.field, 1)[0]
    assert rational_f5.places_above(bp) is rational_f5.places_above(bp)


def test_ramified_places_sqrt_t(corpus_fields):
    S = corpus_fields["sqrt-t-f5"]
    ram = S.ramified_places()
    names = sorted(repr(cp.base) for cp in ram)
    assert names == ["(T)", "oo"]
    assert all(cp.e == 2 for cp in ram)


def test_ramified_places_elliptic(corpus_fields):
    E = corpus_fields["elliptic-f5"]
    bases = {repr(cp.base) for cp in E.ramified_places()}
    # branch locus of x^2 = t^3 - t: the roots 0, 1, -1 and infinity
    assert bases == {"(T)", "(T + 1)", "(T + 4)", "oo"}


def test_rational_model_unramified(rational_f5):
    assert rational_f5.ramified_places() == []


def test_completion_embed_uniformizer(F5):
    bp = rational_places(F5, 1)[0]  # (T)
    comp = completion_embed(F5, bp, 20)
    assert comp.t_image.valuation() == 1
    inf = RationalPlace.infinity(F5)
    comp = completion_embed(F5, inf, 20)
    assert comp.t_image.valuation() == -1


def test_residue_spectrum_rational(rational_f5):
    spec = rational_f5.residue_spectrum()
    assert spec.a[1] == 6
    assert spec.E == []
    # a_n = number of monic irreducibles of degree n for n >= 2
    assert spec.a[2] == 10


def test_residue_spectrum_artin_schreier(corpus_fields):
    AS = corpus_fields["artin-schreier-f2"]
    spec = AS.residue_spectrum()
    # every listed exceptional size must be a power of q absent as a residue size
    for size in spec.E:
        n = 0
        s = size
        while s % 2 == 0 and s > 1:
            s //= 2
            n += 1
        assert s == 1 and n >= 1
        assert spec.a.get(n, 0) == 0


def test_base_change_reads_same_curve(corpus_fields):
    E = corpus_fields["elliptic-f5"]
    bc = E.base_change(2)
    assert bc.field.order == 25
    assert bc.d_x == E.d_x
    assert E.base_change(2) is bc  # cached


def test_ur_witness_unramified(rational_f5):
    F = rational_f5
    for bp in rational_places(F.field, 1):
        w = F.ur_witness(bp)
        if bp.is_infinite:
            assert w.infinite_case
        else:
            assert w.multiplicity == 1
            assert w.g is not None
