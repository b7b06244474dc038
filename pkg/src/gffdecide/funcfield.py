"""Global function fields K = Quot(F_q[t,x]/(f)) and their places.

A FunctionField wraps an irreducible curve polynomial f(t, x) over F_q.
Places of the rational subfield F_q(t) are monic irreducibles plus the
place at infinity; places of K above them come out of the local
factorization of f over the completed base.  The residue spectrum
(degree-n place counts, with the finite exceptional set E(K)) is computed
exactly from point counts via the zeta-function recurrence.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    BudgetExceeded,
    CurveParseError,
    InseparableInX,
    IrreducibilityUnknown,
    PrecisionExhausted,
    ReducibleCurve,
)
from .ffield import ff_embed, ff_make
from .fpoly import (
    BiPoly,
    FPoly,
    discriminant_x,
    is_irreducible,
    monic_irreducibles,
    poly_factor_ff,
    poly_roots,
)
from .localfield import SPoly, hensel_lift, local_decompose
from .series import INF, LaurentSeries

DEFAULT_PRECISION = 48
DEFAULT_POINT_BUDGET = 10**8


# ---------------------------------------------------------------------------
# curve text format


class _CurveLexer:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def take(self):
        c = self.peek()
        if c is not None:
            self.pos += 1
        return c

    def number(self):
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start : self.pos])


def parse_curve(text, field):
    """Parse a polynomial in t and x with integer coefficients into a BiPoly.

    Grammar: sums/differences of products of powers of atoms, where an atom
    is an integer, t, x, or a parenthesized expression.
    """
    lex = _CurveLexer(text)

    def expr():
        c = lex.peek()
        neg = False
        if c == "-":
            lex.take()
            neg = True
        elif c == "+":
            lex.take()
        acc = term()
        if neg:
            acc = -acc
        while True:
            c = lex.peek()
            if c == "+":
                lex.take()
                acc = acc + term()
            elif c == "-":
                lex.take()
                acc = acc - term()
            else:
                return acc

    def term():
        acc = factor()
        while True:
            c = lex.peek()
            if c == "*":
                lex.take()
                acc = acc * factor()
            elif c is not None and (c.isdigit() or c in "tx("):
                acc = acc * factor()
            else:
                return acc

    def factor():
        base = atom()
        if lex.peek() == "^":
            lex.take()
            if lex.peek() is None or not lex.peek().isdigit():
                raise CurveParseError("expected exponent", lex.pos)
            return base ** lex.number()
        return base

    def atom():
        c = lex.peek()
        if c is None:
            raise CurveParseError("unexpected end of input", lex.pos)
        if c.isdigit():
            return BiPoly.const(field, field.scalar(lex.number()))
        if c == "t":
            lex.take()
            return BiPoly.var_t(field)
        if c == "x":
            lex.take()
            return BiPoly.var_x(field)
        if c == "(":
            lex.take()
            inner = expr()
            if lex.take() != ")":
                raise CurveParseError("missing closing parenthesis", lex.pos)
            return inner
        raise CurveParseError(f"unexpected character {c!r}", lex.pos)

    out = expr()
    if lex.peek() is not None:
        raise CurveParseError(f"trailing input at {lex.pos}", lex.pos)
    return out


# ---------------------------------------------------------------------------
# places of F_q(t)


class RationalPlace:
    """A place of F_q(t): a monic irreducible p(t), or the infinite place."""

    __slots__ = ("field", "poly", "degree")

    def __init__(self, field, poly):
        self.field = field
        self.poly = poly  # FPoly or None for infinity
        self.degree = 1 if poly is None else poly.degree

    @classmethod
    def finite(cls, poly):
        return cls(poly.field, poly.monic())

    @classmethod
    def infinity(cls, field):
        return cls(field, None)

    @property
    def is_infinite(self):
        return self.poly is None

    def key(self):
        if self.poly is None:
            return (1, self.degree, ())
        return (0, self.degree, self.poly.key())

    def __eq__(self, other):
        return isinstance(other, RationalPlace) and self.key() == other.key() and self.field == other.field

    def __hash__(self):
        return hash((self.field, self.key()))

    def __repr__(self):
        if self.poly is None:
            return "oo"
        return f"({self.poly})"


def rational_places(field, n):
    """All places of F_q(t) of degree n, deterministically ordered."""
    out = [RationalPlace.finite(p) for p in monic_irreducibles(field, n)]
    if n == 1:
        out.append(RationalPlace.infinity(field))
    return out


class BaseCompletion:
    """The completion of F_q(t) at a rational place: R((u)) with t's image."""

    __slots__ = ("place", "residue_field", "emb", "t_image", "prec")

    def __init__(self, place, residue_field, emb, t_image, prec):
        self.place = place
        self.residue_field = residue_field
        self.emb = emb
        self.t_image = t_image
        self.prec = prec

    def __repr__(self):
        return f"BaseCompletion({self.place}, |R|={self.residue_field.order})"


def completion_embed(field, place, precision=DEFAULT_PRECISION):
    """Residue field and the image of t at a rational place.

    Finite place p(t): t maps to the Hensel root of p(T) - u over
    F_{q^deg}((u)) lifting the residue generator.  Infinite place: t maps
    to 1/u exactly.
    """
    if place.is_infinite:
        t_img = LaurentSeries(field, -1, [field.one])
        return BaseCompletion(place, field, ff_embed(field, field), t_img, INF)
    p = place.poly
    d = p.degree
    if d == 1:
        c = -p.coeffs[0]
        t_img = LaurentSeries(field, 0, [c, field.one])
        return BaseCompletion(place, field, ff_embed(field, field), t_img, INF)
    R = ff_make(field.p, field.m * d)
    emb = ff_embed(field, R)
    p_up = FPoly(R, [emb(c) for c in p.coeffs])
    theta = poly_roots(p_up)[0]
    coeffs = [LaurentSeries.constant(R, c) for c in p_up.coeffs]
    coeffs[0] = coeffs[0] - LaurentSeries.uniformizer(R)
    t_img = hensel_lift(SPoly(R, tuple(coeffs)), theta, precision)
    return BaseCompletion(place, R, emb, t_img, precision)


# ---------------------------------------------------------------------------
# places of K


class CurvePlace:
    """A place of K above a rational place, identified by its factor index."""

    __slots__ = ("base", "index", "e", "f_res", "degree", "factor", "base_completion")

    def __init__(self, base, index, e, f_res, factor, base_completion):
        self.base = base
        self.index = index
        self.e = e
        self.f_res = f_res
        self.degree = base.degree * f_res
        self.factor = factor  # localfield.LocalFactor
        self.base_completion = base_completion

    def key(self):
        return self.base.key() + (self.index,)

    def __eq__(self, other):
        return isinstance(other, CurvePlace) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"CurvePlace({self.base}#{self.index}, e={self.e}, f={self.f_res})"


def _powmod(base, exp, mod):
    """base^exp modulo mod, for FPolys."""
    result = FPoly.one(mod.field)
    base = base % mod
    while exp:
        if exp & 1:
            result = (result * base) % mod
        base = (base * base) % mod
        exp >>= 1
    return result


def _monicize(f):
    """Monic model g with g(y) = lc^{n-1} f(y / lc); roots scale by lc."""
    lc = f.coeffs[-1]
    n = f.degree
    if lc.is_known_zero():
        raise ZeroDivisionError("leading coefficient vanished")
    out = []
    lc_pows = [None] * n
    acc = LaurentSeries.one(f.field)
    for k in range(n):
        lc_pows[n - 1 - k] = acc
        acc = acc * lc
    for i in range(n):
        out.append(f.coeffs[i] * lc_pows[i])
    out.append(LaurentSeries.one(f.field))
    return SPoly(f.field, tuple(out)), lc


def _supported_budget(g, prec):
    """Largest local_decompose budget the coefficient precision supports.

    The inexact-coefficient path of local_decompose needs coefficient
    precision at least 2*budget + 2*m*n + 16, so the budget must shrink
    when the completion carries truncated series.
    """
    from .localfield import _integral_scaling

    finite = [c.prec for c in g.coeffs if c.prec is not INF]
    if not finite:
        return max(24, prec // 2)
    m = _integral_scaling(g)
    return min(32, (min(finite) - 16 - 2 * m * g.degree) // 2)


class ResidueSpectrum:
    """Degree-n place counts a_n of K, with the exceptional set E(K)."""

    __slots__ = ("field", "a", "genus_bound", "hasse_weil_threshold", "bound", "E", "N")

    def __init__(self, field, a, genus_bound, bound, N):
        self.field = field
        self.a = a  # dict n -> count, for n <= bound
        self.genus_bound = genus_bound
        self.hasse_weil_threshold = 4 * genus_bound + 3
        self.bound = bound
        self.N = N  # dict n -> degree-one count after extension, n <= bound
        self.E = [field.order**n for n in sorted(a) if a[n] == 0]

    def __repr__(self):
        return f"ResidueSpectrum(a={self.a}, E={self.E})"


class FunctionField:
    """K = Quot(F_q[t,x]/(f)) for f irreducible and separable in x."""

    def __init__(self, field, curve, trusted=False):
        self.field = field
        self.curve = curve
        self.d_x = curve.deg_x
        self.D = curve.total_degree
        if self.d_x < 1:
            raise ReducibleCurve("curve must involve x")
        if curve.deriv_x().is_zero():
            raise InseparableInX("curve is inseparable in x")
        self.x_coeffs = curve.x_coefficients()  # FPolys in t
        self.trusted = trusted
        if not trusted:
            _check_irreducible(curve)
        self._disc = None
        self._above = {}
        self._spectrum = None
        self._base_changes = {}

    @classmethod
    def from_text(cls, field, text, trusted=False):
        return cls(field, parse_curve(text, field), trusted=trusted)

    def __repr__(self):
        return f"FunctionField(q={self.field.order}, f={self.curve})"

    # -- local data ---------------------------------------------------------

    def discriminant(self):
        if self._disc is None:
            if self.d_x == 1:
                self._disc = FPoly.one(self.field)
            else:
                self._disc = discriminant_x(self.curve)
        return self._disc

    def base_completion(self, place, precision=DEFAULT_PRECISION):
        return completion_embed(self.field, place, precision)

    def _local_poly(self, comp):
        """The curve as a polynomial in x over the completed base."""
        R = comp.residue_field
        t_img = comp.t_image
        coeffs = []
        for a in self.x_coeffs:
            acc = LaurentSeries.zero(R)
            for c in reversed(a.coeffs):
                acc = acc * t_img
                if not c.is_zero():
                    acc = acc + LaurentSeries.constant(R, comp.emb(c))
            coeffs.append(acc)
        return SPoly(R, tuple(coeffs))

    def places_above(self, place, precision=None):
        """All places of K above a rational place, deterministically indexed."""
        key = place.key()
        if key in self._above and precision is None:
            return self._above[key]
        prec = DEFAULT_PRECISION if precision is None else precision
        last = None
        for _ in range(5):
            comp = self.base_completion(place, prec)
            try:
                f_loc = self._local_poly(comp)
                g, lc = _monicize(f_loc)
                budget = _supported_budget(g, prec)
                if budget < 4:
                    raise PrecisionExhausted(
                        "completion precision too low for local factoring"
                    )
                factors = local_decompose(g, precision_budget=budget)
                break
            except PrecisionExhausted as ex:
                last = ex
                prec *= 2
        else:
            raise PrecisionExhausted(
                f"places_above failed at {place}: {last}", suggested=prec
            )
        out = [
            CurvePlace(place, i, lf.e, lf.f_res, lf, comp)
            for i, lf in enumerate(factors)
        ]
        if sum(p.e * p.f_res for p in out) != self.d_x:
            raise PrecisionExhausted(f"e*f sum mismatch at {place}", suggested=2 * prec)
        if precision is None:
            self._above[key] = out
        return out

    def ramified_places(self):
        """All places of K with e > 1, via the discriminant locus."""
        out = []
        disc = self.discriminant()
        bases = []
        if not disc.is_zero() and disc.degree >= 1:
            _, factors = poly_factor_ff(disc)
            bases = [RationalPlace.finite(g) for g, _ in factors]
        bases.append(RationalPlace.infinity(self.field))
        bases.sort(key=RationalPlace.key)
        for b in bases:
            for p in self.places_above(b):
                if p.e > 1:
                    out.append(p)
        return out

    # -- counting -----------------------------------------------------------

    def base_change(self, n):
        """The same curve read over F_{q^n}."""
        if n == 1:
            return self
        if n in self._base_changes:
            return self._base_changes[n]
        Fn = ff_make(self.field.p, self.field.m * n)
        bc = FunctionField(Fn, self.curve.map_field(Fn), trusted=True)
        self._base_changes[n] = bc
        return bc

    def count_degree_one_places(self, n, budget=DEFAULT_POINT_BUDGET):
        """N_n: the number of degree-one places after extending constants."""
        if self.field.order**n > budget:
            raise BudgetExceeded(
                f"N_{n} needs q^n = {self.field.order ** n} > budget {budget}",
                required=self.field.order**n,
            )
        bc = self.base_change(n)
        return bc._count_degree_one(budget)

    def _count_degree_one(self, budget):
        F = self.field
        disc = self.discriminant()
        lc = self.x_coeffs[-1]
        Q = F.order
        total = 0
        for c in F.elements():
            if not lc.evaluate(c).is_zero() and not disc.evaluate(c).is_zero():
                spec = FPoly(F, [a.evaluate(c) for a in self.x_coeffs])
                total += _root_count(spec, Q)
            else:
                place = RationalPlace.finite(FPoly(F, [-c, F.one]))
                total += sum(1 for p in self.places_above(place) if p.f_res == 1)
        total += sum(
            1 for p in self.places_above(RationalPlace.infinity(F)) if p.f_res == 1
        )
        return total

    def residue_spectrum(self, budget=DEFAULT_POINT_BUDGET):
        """Exact a_n for n up to the Lemma-resfields bound, and E(K)."""
        if self._spectrum is not None:
            return self._spectrum
        q = self.field.order
        g_b = (self.D - 1) ** 2 // 2
        bound = min(4 * g_b + 2, 2 * self.D * self.D)
        bound = max(bound, 1)
        n0 = min(2 * g_b, bound)
        N = {}
        s = {}
        for n in range(1, n0 + 1):
            N[n] = self.count_degree_one_places(n, budget=budget)
            s[n] = q**n + 1 - N[n]
        # Newton's identities recover the L-polynomial's symmetric functions
        e = [Fraction(1)]
        for k in range(1, 2 * g_b + 1):
            acc = Fraction(0)
            for i in range(1, k + 1):
                acc += (-1) ** (i - 1) * e[k - i] * s[i]
            e.append(acc / k)
        esym = [int(x) for x in e]
        assert all(Fraction(v) == x for v, x in zip(esym, e)), "nonintegral zeta data"
        for n in range(n0 + 1, bound + 1):
            acc = 0
            for i in range(1, 2 * g_b + 1):
                acc += (-1) ** (i - 1) * esym[i] * s.get(n - i, 0)
            s[n] = acc
            N[n] = q**n + 1 - s[n]
        a = {}
        for n in range(1, bound + 1):
            acc = N[n]
            for d in range(1, n):
                if n % d == 0:
                    acc -= d * a[d]
            assert acc % n == 0 and acc >= 0, "inconsistent place counts"
            a[n] = acc // n
        self._spectrum = ResidueSpectrum(self.field, a, g_b, bound, N)
        return self._spectrum

    # -- UR(t) witnesses ----------------------------------------------------

    def ur_witness(self, place):
        return ur_witness(self.field, place)


def _root_count(f, Q):
    """Number of roots of a squarefree FPoly in its coefficient field."""
    x = FPoly(f.field, [f.field.zero, f.field.one])
    xq = _powmod(x, Q, f)
    return f.gcd(xq - x).degree


class UrWitness:
    """Certificate that UR(t) can hold above a rational place.

    At a finite place, g is a p-th root of t modulo p(t) and multiplicity
    is the exact multiplicity of p(t) in t - g^p; multiplicity 1 means any
    unramified place above satisfies the axiom.  At infinity v(t) = -1
    forces v(t - s^p) <= -1 for every s.
    """

    __slots__ = ("place", "g", "multiplicity", "infinite_case")

    def __init__(self, place, g, multiplicity, infinite_case):
        self.place = place
        self.g = g
        self.multiplicity = multiplicity
        self.infinite_case = infinite_case

    def __repr__(self):
        if self.infinite_case:
            return "UrWitness(oo, v(t) = -1)"
        return f"UrWitness({self.place}, g={self.g}, mult={self.multiplicity})"


def ur_witness(field, place):
    """The Lemma-URt data at a rational place of F_q(t)."""
    if place.is_infinite:
        return UrWitness(place, None, None, True)
    p = place.poly
    d = p.degree
    char = field.p
    # t's p-th root in the residue field F_{q^d}: apply Frobenius m*d - 1 times
    exp = char ** (field.m * d - 1)
    tpoly = FPoly(field, [field.zero, field.one])
    g = _powmod(tpoly, exp, p)
    gp = g**char
    diff = tpoly - gp
    assert (diff % p).is_zero(), "p-th root failed"
    mult = 0
    while not diff.is_zero() and (diff % p).is_zero():
        diff = diff // p
        mult += 1
    return UrWitness(place, g, mult, False)


# ---------------------------------------------------------------------------
# elements of K


class KElem:
    """An element of K as a fraction num/den of BiPolys, den nonzero in K."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den=None):
        self.field = field
        self.num = num
        self.den = BiPoly.const(field, field.one) if den is None else den
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator in K")

    @classmethod
    def const(cls, field, a):
        return cls(field, BiPoly.const(field, a))

    @classmethod
    def t(cls, field):
        return cls(field, BiPoly.var_t(field))

    @classmethod
    def x(cls, field):
        return cls(field, BiPoly.var_x(field))

    def is_constant_field(self):
        return self.num.deg_t == 0 and self.num.deg_x == 0 and self.den.deg_t == 0 and self.den.deg_x == 0

    def support_polys(self):
        """FPolys in t whose irreducible factors bound the divisor support."""
        out = []
        for part in (self.num, self.den):
            if part.deg_t == 0 and part.deg_x == 0:
                continue
            out.append(part)
        return out

    def __repr__(self):
        if self.den.deg_t == 0 and self.den.deg_x == 0:
            return f"{self.num}"
        return f"({self.num})/({self.den})"


# ---------------------------------------------------------------------------
# irreducibility


def _check_irreducible(curve):
    """Verify irreducibility of the curve polynomial over F_q.

    Content-free linear polynomials are immediate; t-free ones reduce to
    univariate factorization.  Monic-in-x curves get the full treatment:
    factor locally at a squarefree specialization and try to recombine
    local factors into a global one.  Otherwise a specialization that
    stays irreducible is accepted as a proof; failing that the curve must
    be declared trusted.
    """
    field = curve.field
    coeffs = curve.x_coefficients()
    content = coeffs[0]
    for c in coeffs[1:]:
        content = content.gcd(c)
    if curve.deg_x >= 1 and content.degree >= 1:
        raise ReducibleCurve(f"curve has content {content}")
    if curve.deg_x == 1:
        return
    if curve.deg_t == 0:
        uni = FPoly(field, [c.coeffs[0] if c.degree >= 0 else field.zero for c in coeffs])
        if not is_irreducible(uni):
            raise ReducibleCurve("curve is reducible (univariate in x)")
        return
    monic = coeffs[-1].degree == 0
    if monic:
        if _monic_irreducible_by_recombination(curve):
            return
        raise ReducibleCurve("curve factors over F_q")
    # non-monic fallback: an irreducible specialization of full degree
    for j in (1, 2, 3):
        Fj = ff_make(field.p, field.m * j)
        cj = curve.map_field(Fj)
        cj_coeffs = cj.x_coefficients()
        for c in Fj.elements():
            if cj_coeffs[-1].evaluate(c).is_zero():
                continue
            spec = FPoly(Fj, [a.evaluate(c) for a in cj_coeffs])
            if is_irreducible(spec):
                return
    raise IrreducibilityUnknown(
        "cannot verify irreducibility of a non-monic curve; pass trusted=True"
    )


def _monic_irreducible_by_recombination(curve):
    """Exact irreducibility test for monic-in-x curves.

    Factor the curve over F_q^(alg)[[t - c]] at a squarefree specialization
    and test every proper subset product for being a genuine polynomial
    factor; none dividing exactly proves irreducibility.
    """
    from itertools import combinations

    field = curve.field
    coeffs = curve.x_coefficients()
    disc = discriminant_x(curve) if curve.deg_x > 1 else FPoly.one(field)
    if disc.is_zero():
        # gcd(f, df/dx) is a proper factor
        return False
    n = curve.deg_x
    cap = curve.deg_t * n + 2
    prec = 2 * cap + 8
    for j in (1, 2, 3, 4):
        Fj = ff_make(field.p, field.m * j)
        emb = ff_embed(field, Fj)
        for c0 in Fj.elements():
            dv = FPoly(Fj, [emb(a) for a in disc.coeffs]).evaluate(c0)
            if dv.is_zero():
                continue
            # local factorization at t = c0 + u
            t_img = LaurentSeries(Fj, 0, [c0, Fj.one])
            loc = []
            for a in coeffs:
                acc = LaurentSeries.zero(Fj)
                for cc in reversed(a.coeffs):
                    acc = acc * t_img
                    if not cc.is_zero():
                        acc = acc + LaurentSeries.constant(Fj, emb(cc))
                loc.append(acc)
            g = SPoly(Fj, tuple(loc))
            factors = local_decompose(g, precision_budget=prec)
            k = len(factors)
            if k == 1:
                return True
            for size in range(1, k // 2 + 1):
                for subset in combinations(range(k), size):
                    cand = _series_product_to_bipoly(
                        [factors[i] for i in subset], Fj, c0, cap, field, emb
                    )
                    if cand is None:
                        continue
                    rest = _series_product_to_bipoly(
                        [factors[i] for i in range(k) if i not in subset],
                        Fj, c0, cap, field, emb,
                    )
                    if rest is None:
                        continue
                    if cand * rest == curve:
                        return False
            return True
    raise IrreducibilityUnknown("no squarefree specialization found")


def _series_product_to_bipoly(factors, Fj, c0, cap, field, emb):
    """Reassemble a product of local factors as a BiPoly over F_q, or None."""
    prod = None
    for lf in factors:
        prod = lf.factor if prod is None else prod * lf.factor
    # each coefficient must be a polynomial in t = c0 + u of degree <= cap
    # with coefficients inside the base field
    emb_img = {}
    for a in field.elements():
        emb_img[emb(a)] = a
    t_shift = FPoly(Fj, [-c0, Fj.one])  # t - c0 as a polynomial in t
    out = BiPoly.zero(field)
    x = BiPoly.var_x(field)
    for i, cser in enumerate(prod.coeffs):
        if cser.indistinguishable_from_zero():
            continue
        if cser.valuation() < 0:
            return None
        poly = FPoly.zero(Fj)
        tp = FPoly.one(Fj)
        for k in range(cap + 1):
            ck = cser.coefficient(k)
            if not ck.is_zero():
                poly = poly + tp.scale(ck)
            tp = tp * t_shift
        # the remaining window must vanish
        for k in range(cap + 1, (cser.prec if cser.prec is not INF else cap + 1)):
            if not cser.coefficient(k).is_zero():
                return None
        coeffs_down = []
        for cc in poly.coeffs:
            if cc not in emb_img:
                return None
            coeffs_down.append(emb_img[cc])
        fp = FPoly(field, coeffs_down)
        term = BiPoly.zero(field)
        tpow = BiPoly.const(field, field.one)
        tvar = BiPoly.var_t(field)
        for cc in fp.coeffs:
            if not cc.is_zero():
                term = term + BiPoly.const(field, cc) * tpow
            tpow = tpow * tvar
        out = out + term * x**i
    return out
