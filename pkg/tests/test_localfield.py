"""Local factorization over F_q((u)): Newton polygons, Hensel, decompositions."""

import random

import pytest

from gffdecide.errors import Inseparable, PrecisionExhausted
from gffdecide.ffield import ff_make
from gffdecide.localfield import (
    SPoly,
    hensel_lift,
    local_decompose,
    local_embeddings,
    newton_polygon,
)
from gffdecide.series import INF, LaurentSeries


def sp(F, *int_rows):
    """SPoly from rows of (val, [int coeffs]) or plain ints for constants."""
    coeffs = []
    for row in int_rows:
        if isinstance(row, int):
            coeffs.append(LaurentSeries.constant(F, F.scalar(row)))
        else:
            val, ints = row
            coeffs.append(LaurentSeries.from_int_coeffs(F, val, ints))
    return SPoly(F, tuple(coeffs))


def test_newton_polygon_slopes():
    F = ff_make(5, 1)
    # x^2 - u: single segment of slope -1/2
    f = sp(F, (1, [4]), 0, 1)
    np_ = newton_polygon(f)
    assert len(np_.slopes()) == 1
    # (x - 1)(x - u) = x^2 - (1+u)x + u: slopes -1 and 0
    g = sp(F, (1, [1]), (0, [4, 4]), 1)
    assert len(newton_polygon(g).slopes()) == 2


def test_hensel_lift_simple_root():
    F = ff_make(5, 1)
    u = LaurentSeries.uniformizer(F)
    # x^2 - (1 + u) has the residue root 1
    f = SPoly(F, (-(LaurentSeries.one(F) + u), LaurentSeries.zero(F), LaurentSeries.one(F)))
    r = hensel_lift(f, F.one, 20)
    val = f.evaluate(r)
    assert val.truncate(20).indistinguishable_from_zero()
    assert r.coefficient(0) == F.one


def test_hensel_rejects_multiple_residue_root():
    from gffdecide.errors import NotSimple

    F = ff_make(5, 1)
    u = LaurentSeries.uniformizer(F)
    f = SPoly(F, (u, LaurentSeries.zero(F), LaurentSeries.one(F)))  # x^2 + u
    with pytest.raises(NotSimple):
        hensel_lift(f, F.zero, 10)


def test_decompose_split_product():
    F = ff_make(5, 1)
    u = LaurentSeries.uniformizer(F)
    one = LaurentSeries.one(F)
    # (x - 1)(x - 2)(x - u): three factors, all unramified of residue degree 1
    a, b = LaurentSeries.constant(F, F.scalar(1)), LaurentSeries.constant(F, F.scalar(2))
    f = SPoly(F, (-(a * b * u), a * b + a * u + b * u, -(a + b + u), one))
    factors = local_decompose(f)
    assert sorted((lf.e, lf.f_res) for lf in factors) == [(1, 1)] * 3


def test_decompose_ramified_and_inert():
    F = ff_make(5, 1)
    u = LaurentSeries.uniformizer(F)
    one = LaurentSeries.one(F)
    # x^2 - u is totally ramified
    rf = local_decompose(SPoly(F, (-u, LaurentSeries.zero(F), one)))
    assert [(lf.e, lf.f_res) for lf in rf] == [(2, 1)]
    # x^2 - 2 is inert (2 is a nonsquare mod 5)
    nf = local_decompose(
        SPoly(F, (LaurentSeries.constant(F, F.scalar(-2)), LaurentSeries.zero(F), one))
    )
    assert [(lf.e, lf.f_res) for lf in nf] == [(1, 2)]


def test_decompose_efsum_invariant_random():
    F = ff_make(3, 1)
    rng = random.Random(5)
    one = LaurentSeries.one(F)
    done = 0
    while done < 12:
        deg = rng.randrange(2, 5)
        coeffs = [
            LaurentSeries.from_int_coeffs(
                F, rng.randrange(0, 2), [rng.randrange(3) for _ in range(3)]
            )
            for _ in range(deg)
        ]
        f = SPoly(F, tuple(coeffs) + (one,))
        try:
            factors = local_decompose(f)
        except (Inseparable, PrecisionExhausted):
            continue
        assert sum(lf.e * lf.f_res for lf in factors) == deg
        done += 1


def test_decompose_rejects_inseparable():
    F = ff_make(2, 1)
    one = LaurentSeries.one(F)
    u = LaurentSeries.uniformizer(F)
    # x^2 + u^2 = (x + u)^2 in characteristic 2
    with pytest.raises((Inseparable, PrecisionExhausted)):
        local_decompose(SPoly(F, (u * u, LaurentSeries.zero(F), one)))


def test_decompose_demands_monic():
    F = ff_make(5, 1)
    u = LaurentSeries.uniformizer(F)
    with pytest.raises(PrecisionExhausted):
        local_decompose(SPoly(F, (u, u + u)))


def test_embeddings_verify_roots():
    F = ff_make(5, 1)
    one = LaurentSeries.one(F)
    u = LaurentSeries.uniformizer(F)
    f = SPoly(F, (-u, LaurentSeries.zero(F), one))  # x^2 - u
    pairs = local_embeddings(f, prec=20)
    assert len(pairs) == 1
    lf, emb = pairs[0]
    assert (lf.e, lf.f_res) == (2, 1)
    # the root series squares to the image of u
    sq = emb.x_series * emb.x_series
    assert sq.agrees_with(emb.map_series(u, 16), 12)


def test_embeddings_imprecise_input_raises():
    F = ff_make(5, 1)
    one = LaurentSeries.one(F)
    low = LaurentSeries(F, 0, [F.one], prec=6)  # far too little precision
    with pytest.raises(PrecisionExhausted):
        local_embeddings(SPoly(F, (low, low, one)), prec=24)


def test_spoly_evaluate_and_derivative():
    F = ff_make(3, 1)
    one = LaurentSeries.one(F)
    two = LaurentSeries.constant(F, F.scalar(2))
    f = SPoly(F, (two, one, one))  # x^2 + x + 2
    x0 = LaurentSeries.one(F)
    assert f.evaluate(x0).coefficient(0).to_int() == 1  # 1 + 1 + 2 = 4 = 1 mod 3
    df = f.derivative()
    assert df.degree == 1
    assert df.evaluate(x0).coefficient(0).to_int() == 0  # 2*1 + 1 = 0 mod 3
