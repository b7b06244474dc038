"""Truncated Laurent series: precision tracking, inversion, composition."""

import random

import pytest

from gffdecide.errors import DivisionByZero
from gffdecide.ffield import ff_make
from gffdecide.series import INF, LaurentSeries
from gffdecide.upoly import UPoly


def rand_series(F, rng, exact=False):
    val = rng.randrange(-3, 4)
    n = rng.randrange(1, 8)
    coeffs = [F.from_int(rng.randrange(F.order)) for _ in range(n)]
    if not any(not c.is_zero() for c in coeffs):
        coeffs[0] = F.one
    prec = INF if exact else val + n + rng.randrange(0, 4)
    return LaurentSeries(F, val, coeffs, prec)


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (5, 1), (5, 2)])
def test_ring_laws_sampled(p, m):
    F = ff_make(p, m)
    rng = random.Random(31 * p + m)
    xs = [rand_series(F, rng) for _ in range(8)]
    for a in xs:
        for b in xs:
            assert (a + b).agrees_with(b + a, 10)
            assert (a * b).agrees_with(b * a, 10)
            assert (a - b).agrees_with(-(b - a), 10)
            for c in xs[:3]:
                assert ((a + b) * c).agrees_with(a * c + b * c, 8)


def test_valuation_and_coefficient():
    F = ff_make(5, 1)
    s = LaurentSeries.from_int_coeffs(F, -2, [3, 0, 1])
    assert s.valuation() == -2
    assert s.coefficient(-2).to_int() == 3
    assert s.coefficient(0).to_int() == 1
    assert s.coefficient(5).is_zero()


def test_inverse_round_trip():
    F = ff_make(3, 1)
    rng = random.Random(7)
    for _ in range(20):
        s = rand_series(F, rng)
        inv = s.inverse()
        prod = s * inv
        one = LaurentSeries.one(F)
        assert prod.agrees_with(one, min(8, prod.prec if prod.prec is not INF else 8))
    with pytest.raises(DivisionByZero):
        LaurentSeries.zero(F).inverse()


def test_precision_contagion():
    F = ff_make(5, 1)
    exact = LaurentSeries.from_int_coeffs(F, 0, [1, 2, 3])
    fuzzy = LaurentSeries(F, 0, [F.one], prec=4)
    assert exact.is_exact()
    assert not (exact + fuzzy).is_exact()
    assert (exact + fuzzy).prec == 4
    assert (exact * fuzzy).prec == 4


def test_truncate_and_indistinguishable():
    F = ff_make(2, 1)
    s = LaurentSeries.from_int_coeffs(F, 3, [1])
    t = s.truncate(2)
    assert t.indistinguishable_from_zero()
    assert not s.indistinguishable_from_zero()
    assert LaurentSeries.zero(F).is_known_zero()


def test_derivative_product_rule():
    F = ff_make(5, 1)
    rng = random.Random(13)
    for _ in range(10):
        a = rand_series(F, rng)
        b = rand_series(F, rng)
        lhs = (a * b).derivative()
        rhs = a.derivative() * b + a * b.derivative()
        assert lhs.agrees_with(rhs, 6)


def test_compose_with_square():
    F = ff_make(5, 1)
    u = LaurentSeries.uniformizer(F)
    s = u + u * u  # pi + pi^2
    g = u * u  # substitute pi -> pi^2
    comp = s.compose(g, 12)
    expect = LaurentSeries.from_int_coeffs(F, 2, [1, 0, 1])
    assert comp.agrees_with(expect, 10)


def test_reversion_inverts_composition():
    F = ff_make(5, 1)
    u = LaurentSeries.uniformizer(F)
    s = u + u * u * LaurentSeries.constant(F, F.scalar(3))
    r = s.reversion(12)
    back = s.compose(r, 12)
    assert back.agrees_with(u, 10)


def test_pow_and_shift_and_scale():
    F = ff_make(3, 1)
    u = LaurentSeries.uniformizer(F)
    s = LaurentSeries.one(F) + u
    assert (s**3).agrees_with(LaurentSeries.one(F) + u * u * u, 10)  # Frobenius
    assert s.shift(2).valuation() == 2
    assert s.scale(F.scalar(2)).coefficient(0).to_int() == 2


def test_map_field_preserves_structure():
    F2 = ff_make(2, 1)
    F4 = ff_make(2, 2)
    s = LaurentSeries.from_int_coeffs(F2, -1, [1, 1])
    t = s.map_field(F4)
    assert t.valuation() == -1 and t.field is F4


def test_upoly_mul_and_unit_inv():
    F = ff_make(5, 1)
    rng = random.Random(3)
    N = 16
    for _ in range(10):
        a = UPoly.from_elems(F, [F.from_int(rng.randrange(5)) for _ in range(6)])
        b = UPoly.from_elems(F, [F.from_int(rng.randrange(5)) for _ in range(6)])
        ab = a.mul(b, N)
        ba = b.mul(a, N)
        assert ab == ba
    unit = UPoly.from_elems(F, [F.scalar(2), F.one, F.scalar(4)])
    inv = unit.unit_inv(N)
    assert unit.mul(inv, N) == UPoly.one(F)


def test_upoly_shift_round_trip():
    F = ff_make(3, 1)
    a = UPoly.from_elems(F, [F.one, F.scalar(2)])
    assert a.shift_up(3).shift_down(3) == a
    assert a.shift_up(2).val() == 2
