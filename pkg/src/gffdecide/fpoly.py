"""Polynomial arithmetic over finite fields.

Univariate polynomials (:class:`FPoly`) are dense little-endian coefficient
tuples over an :class:`~gffdecide.ffield.FField`.  Factorization uses
squarefree decomposition, distinct-degree splitting, and equal-degree
splitting derandomized by deterministic iteration over field elements, so
identical inputs always produce identically ordered factor lists.

Bivariate polynomials in (t, x) (:class:`BiPoly`) cover the curve
polynomials; the resultant needed for discriminants is computed by
fraction-free Bareiss elimination over F_q[t].
"""

from __future__ import annotations

import itertools

from .errors import DivisionByZero, FieldMismatch, InseparableInX, ZeroPolynomial
from .ffield import ff_embed


class FPoly:
    """Dense univariate polynomial over an FField."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def from_ints(cls, field, ints):
        return cls(field, [field.scalar(c) for c in ints])

    @classmethod
    def zero(cls, field):
        return cls(field, [])

    @classmethod
    def one(cls, field):
        return cls(field, [field.one])

    @classmethod
    def x(cls, field):
        return cls(field, [field.zero, field.one])

    @classmethod
    def const(cls, field, a):
        return cls(field, [a])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_one(self):
        return len(self.coeffs) == 1 and self.coeffs[0] == self.field.one

    def leading(self):
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i <= self.degree else self.field.zero

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch("polynomials over different fields")

    def __add__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return FPoly(self.field, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return FPoly(self.field, [self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return FPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        self._check(other)
        if self.is_zero() or other.is_zero():
            return FPoly.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return FPoly(self.field, out)

    def scale(self, a):
        return FPoly(self.field, [c * a for c in self.coeffs])

    def __divmod__(self, other):
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        inv = other.leading().inverse()
        quo = [self.field.zero] * max(0, len(rem) - d)
        while len(rem) - 1 >= d and rem:
            c = rem[-1] * inv
            shift = len(rem) - 1 - d
            quo[shift] = c
            for i in range(d + 1):
                rem[shift + i] = rem[shift + i] - c * other.coeffs[i]
            while rem and rem[-1].is_zero():
                rem.pop()
        return FPoly(self.field, quo), FPoly(self.field, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, n):
        r = FPoly.one(self.field)
        a = self
        while n:
            if n & 1:
                r = r * a
            a = a * a
            n >>= 1
        return r

    def powmod(self, n, mod):
        r = FPoly.one(self.field)
        a = self % mod
        while n:
            if n & 1:
                r = (r * a) % mod
            a = (a * a) % mod
            n >>= 1
        return r

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.leading().inverse())

    def derivative(self):
        cs = []
        for i in range(1, len(self.coeffs)):
            cs.append(self.coeffs[i] * self.field.scalar(i))
        return FPoly(self.field, cs)

    def evaluate(self, a):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def compose(self, other):
        acc = FPoly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * other + FPoly.const(self.field, c)
        return acc

    def map_field(self, target):
        """Push coefficients through the canonical embedding into target."""
        emb = ff_embed(self.field, target)
        return FPoly(target, [emb(c) for c in self.coeffs])

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def key(self):
        """Deterministic sort key."""
        return (self.degree, tuple(c.to_int() for c in self.coeffs))

    def __eq__(self, other):
        return (
            isinstance(other, FPoly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in reversed(range(len(self.coeffs))):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            cs = repr(c)
            if i == 0:
                terms.append(cs)
            else:
                xs = "T" if i == 1 else f"T^{i}"
                terms.append(xs if cs == "1" else f"({cs})*{xs}")
        return " + ".join(terms)


def _pth_root_poly(f):
    """For f = g(x^p) return the polynomial whose p-th power is f."""
    F = f.field
    p = F.p
    cs = []
    for i in range(0, f.degree + 1, p):
        cs.append(f[i].pth_root())
    return FPoly(F, cs)


def squarefree_decomposition(f):
    """List of (squarefree monic g, multiplicity e) with prod g^e = f.monic()."""
    if f.is_zero():
        raise ZeroPolynomial("cannot decompose the zero polynomial")
    f = f.monic()
    out = {}

    def rec(f, mult):
        if f.degree < 1:
            return
        d = f.derivative()
        if d.is_zero():
            rec(_pth_root_poly(f), mult * f.field.p)
            return
        g = f.gcd(d)
        w = f // g
        i = 1
        while w.degree >= 1:
            y = w.gcd(g)
            part = w // y
            if part.degree >= 1:
                out[part] = out.get(part, 0) + i * mult
            w = y
            g = g // y
            i += 1
        if g.degree >= 1:
            rec(g, mult)

    rec(f, 1)
    return sorted(out.items(), key=lambda t: t[0].key())


def _distinct_degree(f):
    """Split squarefree monic f into products of irreducibles of equal degree."""
    F = f.field
    q = F.order
    out = []
    x = FPoly.x(F)
    h = x
    d = 0
    rest = f
    while rest.degree > 2 * (d + 1) - 1 and rest.degree >= 1:
        d += 1
        h = h.powmod(q, rest)
        g = rest.gcd(h - x)
        if g.degree >= 1:
            out.append((g, d))
            rest = rest // g
            h = h % rest
    if rest.degree >= 1:
        out.append((rest, rest.degree))
    return out


def _split_equal_degree(f, d):
    """Fully split a product of distinct irreducibles of degree d."""
    F = f.field
    if f.degree == d:
        return [f.monic()]
    q = F.order
    # deterministic candidate sequence: all polynomials of degree < deg f
    # (non-monic leading coefficients matter: over F_4 no monic linear
    # polynomial has a trace map separating the factors of T^2 + T + 1)
    for deg in range(1, f.degree):
        for lead in range(1, F.order):
            for cs in itertools.product(range(F.order), repeat=deg):
                a = FPoly(F, [F.from_int(c) for c in cs] + [F.from_int(lead)])
                if F.p == 2:
                    # trace map over F_2
                    b = FPoly.zero(F)
                    t = a % f
                    k = d * F.m
                    for _ in range(k):
                        b = (b + t) % f
                        t = (t * t) % f
                else:
                    b = a.powmod((q**d - 1) // 2, f) - FPoly.one(F)
                g = f.gcd(b)
                if 1 <= g.degree < f.degree:
                    return sorted(
                        _split_equal_degree(g, d) + _split_equal_degree(f // g, d),
                        key=FPoly.key,
                    )
    raise AssertionError("equal-degree splitting failed")  # pragma: no cover


def poly_factor_ff(f):
    """Factor f over its finite coefficient field.

    Returns (unit, [(monic irreducible, multiplicity), ...]) with the factor
    list in deterministic order and unit * prod(g^e) = f.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    unit = f.leading()
    out = []
    for sf, mult in squarefree_decomposition(f):
        for part, d in _distinct_degree(sf):
            for irr in _split_equal_degree(part, d):
                out.append((irr, mult))
    out.sort(key=lambda t: t[0].key())
    return unit, out


def is_irreducible(f):
    if f.is_zero() or f.degree < 1:
        return False
    _, factors = poly_factor_ff(f)
    return len(factors) == 1 and factors[0][1] == 1 and factors[0][0].degree == f.degree


def poly_roots(f):
    """Roots of f in its coefficient field, in deterministic order."""
    _, factors = poly_factor_ff(f)
    roots = [-fac.coeffs[0] for fac, _ in factors if fac.degree == 1]
    return sorted(roots, key=lambda a: a.to_int())


def monic_irreducibles(field, degree):
    """All monic irreducible polynomials of the given degree, ordered."""
    out = []
    for n in range(field.order**degree):
        cs = []
        k = n
        for _ in range(degree):
            cs.append(field.from_int(k % field.order))
            k //= field.order
        f = FPoly(field, cs + [field.one])
        if is_irreducible(f):
            out.append(f)
    return sorted(out, key=FPoly.key)


# ---------------------------------------------------------------------------
# bivariate polynomials in (t, x)


class BiPoly:
    """Sparse polynomial in t and x over an FField."""

    __slots__ = ("field", "terms")

    def __init__(self, field, terms):
        self.field = field
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    @classmethod
    def zero(cls, field):
        return cls(field, {})

    @classmethod
    def const(cls, field, a):
        return cls(field, {(0, 0): a})

    @classmethod
    def var_t(cls, field):
        return cls(field, {(1, 0): field.one})

    @classmethod
    def var_x(cls, field):
        return cls(field, {(0, 1): field.one})

    def is_zero(self):
        return not self.terms

    @property
    def deg_t(self):
        return max((i for i, _ in self.terms), default=-1)

    @property
    def deg_x(self):
        return max((j for _, j in self.terms), default=-1)

    @property
    def total_degree(self):
        return max((i + j for i, j in self.terms), default=-1)

    def __add__(self, other):
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return BiPoly(self.field, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BiPoly(self.field, {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        terms = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                c = a * b
                terms[k] = terms[k] + c if k in terms else c
        return BiPoly(self.field, terms)

    def __pow__(self, n):
        r = BiPoly.const(self.field, self.field.one)
        a = self
        while n:
            if n & 1:
                r = r * a
            a = a * a
            n >>= 1
        return r

    def deriv_x(self):
        terms = {}
        for (i, j), a in self.terms.items():
            if j >= 1:
                terms[(i, j - 1)] = a * self.field.scalar(j)
        return BiPoly(self.field, terms)

    def x_coefficients(self):
        """Coefficients of powers of x, each an FPoly in t; length deg_x+1."""
        dx = self.deg_x
        cols = [[] for _ in range(dx + 1)]
        for j in range(dx + 1):
            dt = max((i for (i, jj) in self.terms if jj == j), default=-1)
            col = [self.field.zero] * (dt + 1)
            for (i, jj), a in self.terms.items():
                if jj == j:
                    col[i] = a
            cols[j] = FPoly(self.field, col)
        return cols

    def eval_t(self, c):
        """Substitute t = c, returning an FPoly in x."""
        dx = self.deg_x
        out = [self.field.zero] * (dx + 1)
        for (i, j), a in self.terms.items():
            out[j] = out[j] + a * (c**i)
        return FPoly(self.field, out)

    def map_field(self, target):
        emb = ff_embed(self.field, target)
        return BiPoly(target, {k: emb(v) for k, v in self.terms.items()})

    def __eq__(self, other):
        return (
            isinstance(other, BiPoly)
            and self.field == other.field
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field, tuple(sorted((k, v.coeffs) for k, v in self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j) in sorted(self.terms, key=lambda k: (k[1], k[0]), reverse=True):
            a = self.terms[(i, j)]
            bits = []
            cs = repr(a)
            if cs != "1" or (i == 0 and j == 0):
                bits.append(cs if len(cs) < 4 else f"({cs})")
            if i:
                bits.append("t" if i == 1 else f"t^{i}")
            if j:
                bits.append("x" if j == 1 else f"x^{j}")
            parts.append("*".join(bits))
        return " + ".join(parts)


def _poly_matrix_det(rows, field):
    """Fraction-free Bareiss determinant of a square matrix of FPolys."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = FPoly.one(field)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return FPoly.zero(field)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                q, r = divmod(num, prev)
                assert r.is_zero()
                m[i][j] = q
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant_x(f, g):
    """Resultant of two BiPolys with respect to x, as an FPoly in t."""
    field = f.field
    fc = f.x_coefficients()
    gc = g.x_coefficients()
    n, m = len(fc) - 1, len(gc) - 1
    if n < 0 or m < 0:
        raise ZeroPolynomial("resultant of zero polynomial")
    size = n + m
    if size == 0:
        return FPoly.one(field)
    rows = []
    for i in range(m):
        row = [FPoly.zero(field)] * size
        for j, c in enumerate(reversed(fc)):
            row[i + j] = c
        rows.append(row)
    for i in range(n):
        row = [FPoly.zero(field)] * size
        for j, c in enumerate(reversed(gc)):
            row[i + j] = c
        rows.append(row)
    return _poly_matrix_det(rows, field)


def discriminant_x(f):
    """Resultant of f and df/dx in x; the finite-ramification locator."""
    fx = f.deriv_x()
    if fx.is_zero():
        raise InseparableInX("polynomial is inseparable in x")
    if f.deg_x == 1:
        return FPoly.one(f.field)
    return resultant_x(f, fx)
