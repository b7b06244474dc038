"""Univariate and bivariate polynomials over F_q: factorization oracles."""

import random

import pytest

from gffdecide.ffield import ff_make
from gffdecide.fpoly import (
    BiPoly,
    FPoly,
    discriminant_x,
    is_irreducible,
    monic_irreducibles,
    poly_factor_ff,
    poly_roots,
    resultant_x,
    squarefree_decomposition,
)


def necklace_count(q, n):
    """Number of monic irreducibles of degree n by Moebius inversion."""

    def mu(k):
        out, d = 1, 2
        while d * d <= k:
            if k % d == 0:
                k //= d
                if k % d == 0:
                    return 0
                out = -out
            d += 1
        if k > 1:
            out = -out
        return out

    total = 0
    d = 1
    while d <= n:
        if n % d == 0:
            total += mu(n // d) * q**d
        d += 1
    return total // n


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (5, 1), (2, 2)])
def test_monic_irreducible_counts(p, m):
    F = ff_make(p, m)
    for n in range(1, 5):
        got = monic_irreducibles(F, n)
        assert len(got) == necklace_count(F.order, n)
        for f in got:
            assert f.degree == n and is_irreducible(f)


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_factor_random_products(p, m):
    F = ff_make(p, m)
    rng = random.Random(97 * p + m)
    pool = monic_irreducibles(F, 1) + monic_irreducibles(F, 2) + monic_irreducibles(F, 3)
    for _ in range(15):
        parts = [rng.choice(pool) for _ in range(rng.randrange(1, 4))]
        prod = FPoly.one(F)
        for g in parts:
            prod = prod * g
        lead, factors = poly_factor_ff(prod)
        assert lead == F.one
        rebuilt = FPoly.one(F)
        for g, e in factors:
            assert is_irreducible(g)
            rebuilt = rebuilt * g**e
        assert rebuilt == prod


def test_factor_known_char2():
    # T^2 + T + 1 is the unique irreducible quadratic over F_2 but splits over F_4
    F2 = ff_make(2, 1)
    f = FPoly.from_ints(F2, [1, 1, 1])
    assert is_irreducible(f)
    F4 = ff_make(2, 2)
    g = f.map_field(F4)
    _, factors = poly_factor_ff(g)
    assert sorted(h.degree for h, _ in factors) == [1, 1]


def test_roots_match_evaluation():
    F = ff_make(5, 1)
    rng = random.Random(11)
    for _ in range(20):
        f = FPoly.from_ints(F, [rng.randrange(5) for _ in range(rng.randrange(2, 6))] + [1])
        roots = poly_roots(f)
        truth = [a for a in F.elements() if f.evaluate(a).is_zero()]
        assert sorted(r.to_int() for r in roots) == sorted(a.to_int() for a in truth)


def test_squarefree_decomposition_powers():
    F = ff_make(3, 1)
    t = FPoly.x(F)
    one = FPoly.one(F)
    f = (t + one) ** 2 * t * (t * t + one)
    parts = squarefree_decomposition(f)
    rebuilt = FPoly.one(F)
    for g, e in parts:
        rebuilt = rebuilt * g**e
    assert rebuilt == f.monic()
    assert any(e == 2 for _, e in parts)


def test_gcd_and_divmod():
    F = ff_make(5, 1)
    t = FPoly.x(F)
    one = FPoly.one(F)
    a = (t + one) * (t * t + FPoly.const(F, F.scalar(2)))
    b = (t + one) * t
    g = a.gcd(b)
    assert g.monic() == (t + one)
    q, r = divmod(a, b)
    assert q * b + r == a and (r.is_zero() or r.degree < b.degree)


def test_bipoly_arithmetic_and_x_coefficients():
    F = ff_make(5, 1)
    t, x = BiPoly.var_t(F), BiPoly.var_x(F)
    f = x * x - (t * t * t - t)
    assert f.deg_x == 2 and f.deg_t == 3
    cs = f.x_coefficients()
    assert len(cs) == 3
    assert cs[1].is_zero()
    assert cs[2] == FPoly.one(F)
    # (t^3 - t) with a sign flip sits in degree 0
    assert cs[0] == -(FPoly.x(F) ** 3 - FPoly.x(F))


def test_resultant_detects_common_factor():
    F = ff_make(5, 1)
    t, x = BiPoly.var_t(F), BiPoly.var_x(F)
    f = x * x - t
    g = x - t
    r = resultant_x(f, g)
    # Res_x(x^2 - t, x - t) = t^2 - t, vanishing exactly where they meet
    assert r.monic() == (FPoly.x(F) ** 2 - FPoly.x(F)).monic()
    assert not resultant_x(f, x).is_zero()


def test_discriminant_x_quadratic():
    F = ff_make(5, 1)
    t, x = BiPoly.var_t(F), BiPoly.var_x(F)
    d = discriminant_x(x * x - t)
    # disc(x^2 - t) = 4t up to the normalization constant
    assert d.degree == 1
    assert not d.is_zero()


def test_pow_and_eval_t():
    F = ff_make(3, 1)
    t, x = BiPoly.var_t(F), BiPoly.var_x(F)
    f = (x + t) ** 2
    assert f == x * x + t * x + t * x + t * t
    fx = f.eval_t(F.one)
    assert fx.evaluate(F.scalar(2)).is_zero()  # (2 + 1)^2 = 0 in F_3
