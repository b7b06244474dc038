"""Polynomials over Laurent series: Newton polygons, Hensel lifting, and
local decomposition.

local_decompose is the workhorse: given a monic squarefree polynomial over
F_{q^d}((u)) it returns the ramification index, residue degree and an
approximate factor for every irreducible factor over the completion.  The
factorization is obtained from the maximal order of the quotient algebra
(see maxorder), which handles wild ramification uniformly; the Newton
polygon and Hensel operations are still exposed on their own since the
tame/unramified fast paths elsewhere rely on them.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DegreeZero,
    Inseparable,
    NotSimple,
    PrecisionExhausted,
)
from .fpoly import FPoly
from .maxorder import LocalAlgebra, MaxOrderError, maximal_order, split_components
from .series import INF, LaurentSeries


class SPoly:
    """Dense univariate polynomial with LaurentSeries coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = list(coeffs)
        while cs and cs[-1].is_known_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def from_series(cls, coeffs):
        if not coeffs:
            raise DegreeZero("empty coefficient list")
        return cls(coeffs[0].field, coeffs)

    @classmethod
    def from_fpoly(cls, f, prec=INF):
        """Constant-series coefficients from a polynomial over the field."""
        return cls(f.field, [LaurentSeries.constant(f.field, c, prec) for c in f.coeffs])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coefficient(self, i):
        if 0 <= i <= self.degree:
            return self.coeffs[i]
        return LaurentSeries.zero(self.field)

    def is_monic(self):
        if self.is_zero():
            return False
        lead = self.coeffs[-1]
        one = LaurentSeries.one(self.field)
        return (lead - one).is_known_zero()

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return SPoly(self.field, [self.coefficient(i) + other.coefficient(i) for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return SPoly(self.field, [self.coefficient(i) - other.coefficient(i) for i in range(n)])

    def __neg__(self):
        return SPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return SPoly(self.field, [])
        out = [LaurentSeries.zero(self.field)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return SPoly(self.field, out)

    def scale(self, s):
        return SPoly(self.field, [c * s for c in self.coeffs])

    def evaluate(self, s):
        acc = LaurentSeries.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def derivative(self):
        return SPoly(
            self.field,
            [c.scale(self.field.scalar(i)) for i, c in enumerate(self.coeffs)][1:],
        )

    def residue_poly(self):
        """Reduction modulo u; requires integral coefficients."""
        out = []
        for c in self.coeffs:
            if c.is_known_zero():
                out.append(self.field.zero)
                continue
            out.append(c.coefficient(0))
        return FPoly(self.field, out)

    def truncate(self, prec):
        return SPoly(self.field, [c.truncate(prec) for c in self.coeffs])

    def map_field(self, target):
        return SPoly(target, [c.map_field(target) for c in self.coeffs])

    def __eq__(self, other):
        return (
            isinstance(other, SPoly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        if self.is_zero():
            return "SPoly(0)"
        terms = []
        for i in reversed(range(len(self.coeffs))):
            c = self.coeffs[i]
            if c.is_known_zero():
                continue
            xi = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(f"({c}){xi}" if xi else f"({c})")
        return " + ".join(terms)


class NewtonPolygon:
    """Lower convex hull of the coefficient valuation points of a polynomial."""

    __slots__ = ("points", "vertices", "segments")

    def __init__(self, points, vertices, segments):
        self.points = points  # list of (i, val) for provably nonzero coefficients
        self.vertices = vertices
        self.segments = segments  # list of (slope: Fraction, length: int)

    def slopes(self):
        return [s for s, _ in self.segments]

    def __repr__(self):
        seg = ", ".join(f"slope {s} x{l}" for s, l in self.segments)
        return f"NewtonPolygon({seg})"


def newton_polygon(f):
    """Newton polygon of a nonzero SPoly.

    Points whose coefficients are indistinguishable from zero must lie on or
    above the hull of the certified points, otherwise the hull is not
    certified and PrecisionExhausted is raised.
    """
    if f.is_zero():
        raise DegreeZero("newton polygon of the zero polynomial")
    certain = []
    fuzzy = []
    for i, c in enumerate(f.coeffs):
        if c.is_known_zero():
            continue
        if c.indistinguishable_from_zero():
            fuzzy.append((i, c.prec))
            continue
        certain.append((i, c.valuation()))
    if not certain:
        raise PrecisionExhausted("no coefficient valuation is certified")
    # lower hull, left to right (Andrew monotone chain, lower part only)
    hull = []
    for pt in certain:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) <= (pt[0] - x1) * (y2 - y1):
                hull.pop()
            else:
                break
        hull.append(pt)

    def hull_height(x):
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= x <= x2:
                return Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (x - x1)
        return None

    for i, lower_bound in fuzzy:
        h = hull_height(i)
        if h is not None and Fraction(lower_bound) < h:
            raise PrecisionExhausted(
                f"coefficient {i} known only to O(u^{lower_bound}), below the hull",
            )
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y1 - y2, x2 - x1)
        segments.append((slope, x2 - x1))
    return NewtonPolygon(certain, hull, segments)


def hensel_lift(f, seed, target_precision):
    """Lift a simple residue root or a coprime residue factorization.

    With an FFElem seed, returns the unique root of f congruent to the seed,
    as a LaurentSeries with precision >= target_precision.  With a pair
    (g0, h0) of coprime monic FPoly factors of the residue of f, returns the
    pair of monic SPoly factors (G, H) with f = G*H to the target precision.
    """
    for c in f.coeffs:
        if not c.is_known_zero() and c.valuation() < 0:
            raise PrecisionExhausted("hensel_lift requires integral coefficients")
    fbar = f.residue_poly()
    if isinstance(seed, tuple):
        return _hensel_factors(f, seed[0], seed[1], fbar, target_precision)
    fpbar = fbar.derivative()
    if not fbar.evaluate(seed).is_zero():
        raise NotSimple("seed is not a residue root")
    if fpbar.evaluate(seed).is_zero():
        raise NotSimple("seed is a multiple residue root")
    # Newton contact doubles each step, which outruns naive precision
    # propagation; work on exact truncations and claim the precision at the end.
    target = target_precision
    for c in f.coeffs:
        if not c.is_exact():
            target = min(target, c.prec)
    if target < target_precision:
        raise PrecisionExhausted(
            "coefficients too imprecise for the requested root precision",
            suggested=target_precision,
        )

    def chop(s, prec):
        cs = list(s.coeffs[: max(0, prec - s.val)])
        return LaurentSeries(s.field, s.val, cs)

    r = LaurentSeries.constant(f.field, seed)
    fp = f.derivative()
    prec = 1
    while prec < target:
        prec = min(2 * prec, target)
        val = chop(f.evaluate(r), prec)
        dval = chop(fp.evaluate(r), prec)
        r = chop(r - val * dval.inverse(rel_prec=prec), prec)
    return LaurentSeries(f.field, r.val, list(r.coeffs), target)


def _hensel_factors(f, g0, h0, fbar, target_precision):
    """Linear Hensel lifting of a coprime monic residue factorization."""
    from .maxorder import _poly_invmod

    F = f.field
    if not (g0 * h0 - fbar.monic()).is_zero():
        raise NotSimple("seed factorization does not match the residue")
    binv = _poly_invmod(h0, g0) if g0.degree > 0 else None
    if g0.degree > 0 and binv is None:
        raise NotSimple("seed factors are not coprime")
    n = f.degree
    N = target_precision
    # Gc[k][j] = coefficient of u^j in the x^k coefficient of G
    Gc = [[c] for c in g0.coeffs]
    Hc = [[c] for c in h0.coeffs]

    def coeff(arr, k, j):
        if k < len(arr) and j < len(arr[k]):
            return arr[k][j]
        return F.zero

    fcoeffs = [[c.coefficient(j) for j in range(N)] for c in f.coeffs]
    for step in range(1, N):
        # e = coefficient of u^step in f - G*H, as an FPoly in x
        err = []
        for k in range(n + 1):
            s = fcoeffs[k][step] if k < len(fcoeffs) else F.zero
            for k1 in range(min(k, g0.degree) + 1):
                k2 = k - k1
                if k2 > h0.degree:
                    continue
                for j in range(step + 1):
                    s = s - coeff(Gc, k1, j) * coeff(Hc, k2, step - j)
            err.append(s)
        e = FPoly(F, err)
        if e.is_zero():
            continue
        if g0.degree == 0:
            dg = FPoly.zero(F)
            dh = e
        else:
            dg = (binv * e) % g0
            dh = (e - dg * h0) // g0
        for k in range(g0.degree):
            c = dg[k]
            if not c.is_zero():
                while len(Gc[k]) <= step:
                    Gc[k].append(F.zero)
                Gc[k][step] = Gc[k][step] + c
        for k in range(h0.degree):
            c = dh[k]
            if not c.is_zero():
                while len(Hc[k]) <= step:
                    Hc[k].append(F.zero)
                Hc[k][step] = Hc[k][step] + c
    G = SPoly(F, [LaurentSeries(F, 0, row, N) for row in Gc])
    H = SPoly(F, [LaurentSeries(F, 0, row, N) for row in Hc])
    return G, H


class LocalFactor:
    """One irreducible factor of f over the completion F_{q^d}((u))."""

    __slots__ = ("e", "f_res", "factor", "component", "scaling")

    def __init__(self, e, f_res, factor, component=None, scaling=0):
        self.e = e
        self.f_res = f_res
        self.factor = factor
        self.component = component  # maxorder.LocalComponent for the scaled model
        self.scaling = scaling  # f was decomposed after x = u^{-m} y with m = scaling

    def __repr__(self):
        return f"LocalFactor(e={self.e}, f_res={self.f_res}, deg={self.factor.degree})"


def _integral_scaling(f):
    """Least m >= 0 such that u^{mn} f(u^{-m} x) is integral."""
    n = f.degree
    m = 0
    for i, c in enumerate(f.coeffs[:-1]):
        if c.is_known_zero():
            continue
        v = c.valuation()
        if v < 0:
            need = (-v + (n - i) - 1) // (n - i)
            m = max(m, need)
    return m


def _scaled_upolys(f, m, N):
    """Coefficients of u^{mn} f(u^{-m} x) as UPoly in u, reduced mod u^N."""
    from .upoly import UPoly

    n = f.degree
    out = []
    for i, c in enumerate(f.coeffs):
        shifted = c.shift(m * (n - i))
        if shifted.is_known_zero():
            out.append(UPoly.zero(f.field))
            continue
        if not shifted.is_exact() and shifted.prec < N:
            raise PrecisionExhausted(
                "input coefficients too imprecise for the working precision",
                suggested=N + m * n,
            )
        v = shifted.valuation() if not shifted.indistinguishable_from_zero() else None
        if v is None:
            out.append(UPoly.zero(f.field))
            continue
        assert v >= 0
        elems = [f.field.zero] * v + list(shifted.coeffs)
        out.append(UPoly.from_elems(f.field, elems[:N]))
    return out


def _exact_disc_valuation(f, m):
    """u-valuation of disc of the scaled model, for exact coefficients.

    Returns the valuation, or raises Inseparable when the discriminant
    vanishes (repeated factors).  Exact: uses the bivariate resultant.
    """
    from .fpoly import BiPoly, resultant_x

    n = f.degree
    if n == 1:
        return 0
    terms = {}
    for i, c in enumerate(f.coeffs):
        shifted = c.shift(m * (n - i))
        if shifted.is_known_zero():
            continue
        for j, a in enumerate(shifted.coeffs):
            if not a.is_zero():
                terms[(shifted.val + j, i)] = a
    g = BiPoly(f.field, terms)
    dg = g.deriv_x()
    if dg.is_zero():
        raise Inseparable("inseparable polynomial (f' = 0)")
    r = resultant_x(g, dg)
    if r.is_zero():
        raise Inseparable("polynomial is not squarefree (disc = 0)")
    return next(i for i, c in enumerate(r.coeffs) if not c.is_zero())


def local_decompose(f, precision_budget=32):
    """Factor data of a monic squarefree polynomial over F_{q^d}((u)).

    Returns a deterministically ordered list of LocalFactor with
    sum(e_i * f_res_i) = deg f.  The working window escalates internally on
    failure; PrecisionExhausted escapes only when the input coefficients are
    too imprecise or the escalation cap is hit.
    """
    if f.is_zero() or f.degree < 1:
        raise DegreeZero("local_decompose needs positive degree")
    if not f.is_monic():
        raise PrecisionExhausted("local_decompose requires an exactly monic input")
    deriv = f.derivative()
    if all(c.is_known_zero() for c in deriv.coeffs):
        raise Inseparable("inseparable polynomial (f' = 0)")
    n = f.degree
    m = _integral_scaling(f)
    if all(c.is_exact() for c in f.coeffs):
        delta = _exact_disc_valuation(f, m)
        # the order iteration divides by u at most delta/2+1 times and the
        # idempotent lifting spends O(s log N) more with s <= delta + 1
        N = precision_budget + 2 * m * n + 2 * delta + 20 * (delta + 1) + 10
    else:
        N = 2 * precision_budget + 2 * m * n + 16
    last_err = None
    for _ in range(6):
        try:
            return _decompose_attempt(f, m, N, precision_budget)
        except (MaxOrderError, PrecisionExhausted) as err:
            last_err = err
            if isinstance(err, PrecisionExhausted) and not isinstance(err, MaxOrderError):
                # the input itself is too imprecise; escalating N cannot help
                raise
            N *= 2
            if N > 8192:
                break
    raise PrecisionExhausted(
        f"local_decompose failed at window {N}: {last_err}", suggested=2 * N
    )


def _decompose_attempt(f, m, N, budget):
    field = f.field
    n = f.degree
    fcoeffs = _scaled_upolys(f, m, N)
    alg = LocalAlgebra(field, fcoeffs, N)
    order = maximal_order(alg)
    comps = split_components(alg, order)
    # triangular solves inside the component charpoly divide by pivots; their
    # total valuation bounds the extra loss on the factor coefficients
    good_prec = min(comp.prec - comp.pivot_loss() for comp in comps) - 2
    if good_prec < budget:
        raise MaxOrderError("insufficient certified precision")
    factors = []
    total = 0
    for comp in comps:
        coeffs = comp.factor_series_coeffs(good_prec)
        # undo the scaling x = u^{-m} y on the factor G(y): coefficient of y^k
        # picks up u^{m(k - deg G)}
        degG = len(coeffs) - 1
        unscaled = [c.shift(m * (k - degG)) for k, c in enumerate(coeffs)]
        unscaled[-1] = LaurentSeries.one(field)  # monic by construction
        fac = SPoly(field, unscaled)
        factors.append(LocalFactor(comp.e, comp.f_res, fac, comp, m))
        total += comp.e * comp.f_res
    if total != n:
        raise MaxOrderError("e*f data does not sum to the degree")
    # reconstruction check: product of factors agrees with f
    prod = SPoly.from_fpoly(FPoly.one(field))
    for lf in factors:
        prod = prod * lf.factor
    diff = prod - f
    for c in diff.coeffs:
        if not c.indistinguishable_from_zero():
            raise MaxOrderError("factor product does not reconstruct the input")
    return factors


# ---------------------------------------------------------------------------
# embedding models


class LocalEmbedding:
    """A concrete model F_Q((pi)) of the local field cut out by one factor.

    u_series is the pi-expansion of the base uniformizer (valuation e);
    x_series is a root of the input polynomial in the model.  emb embeds the
    base residue field into F_Q.
    """

    __slots__ = ("base_field", "FQ", "emb", "e", "f_res", "u_series", "x_series", "prec")

    def __init__(self, base_field, FQ, emb, e, f_res, u_series, x_series, prec):
        self.base_field = base_field
        self.FQ = FQ
        self.emb = emb
        self.e = e
        self.f_res = f_res
        self.u_series = u_series
        self.x_series = x_series
        self.prec = prec

    def map_series(self, s, prec=None):
        """Image of a series in u (over the base field) in F_Q((pi))."""
        target = self.prec if prec is None else prec
        up = s.map_field(self.FQ)
        return up.compose(self.u_series, target)

    def __repr__(self):
        return f"LocalEmbedding(e={self.e}, f_res={self.f_res}, |FQ|={self.FQ.order})"


def _factor_embedding(lf, field, P):
    """Build the embedding model for one LocalFactor at pi-precision P."""
    from .maxorder import ComponentExpansion

    ce = ComponentExpansion(lf.component)
    us = ce.expand_u(P)
    xs = ce.expand_x(P)
    u_series = LaurentSeries(ce.FQ, 0, us, P)
    y_series = LaurentSeries(ce.FQ, 0, xs, P)
    if lf.scaling:
        x_series = y_series * (u_series.inverse() ** lf.scaling)
    else:
        x_series = y_series
    return LocalEmbedding(
        field, ce.FQ, ce.emb, lf.e, lf.f_res, u_series, x_series,
        min(P, x_series.prec if x_series.prec is not INF else P),
    )


def local_embeddings(f, prec=24):
    """Embedding models for every local factor of f, with verification.

    Returns a list of (LocalFactor, LocalEmbedding) pairs.  Each model is
    checked by evaluating f at its root series; failure escalates the
    working precision of the decomposition.
    """
    from .errors import PrecisionExhausted
    from .maxorder import MaxOrderError

    budget = max(prec + 24, 32)
    finite = [c.prec for c in f.coeffs if c.prec is not INF]
    if finite:
        # the inexact path of local_decompose needs coefficient precision
        # 2*budget + 2*m*n + 16; trim the budget so the attempt can succeed
        supported = (min(finite) - 16 - 2 * _integral_scaling(f) * f.degree) // 2
        if supported < 12:
            raise PrecisionExhausted(
                "coefficients too imprecise for embedding models",
                suggested=2 * (budget + _integral_scaling(f) * f.degree) + 48,
            )
        budget = min(budget, supported)
    last = None
    for _ in range(6):
        try:
            factors = local_decompose(f, precision_budget=budget)
            out = []
            for lf in factors:
                emb = _factor_embedding(lf, f.field, prec + lf.e * lf.scaling + 2)
                val = LaurentSeries.zero(emb.FQ)
                for c in reversed(f.coeffs):
                    val = val * emb.x_series + emb.map_series(c, prec)
                if not val.truncate(prec - 1).indistinguishable_from_zero():
                    raise MaxOrderError("embedding model failed verification")
                out.append((lf, emb))
            return out
        except (MaxOrderError, PrecisionExhausted) as ex:
            last = ex
            budget *= 2
    raise PrecisionExhausted(
        f"could not certify embedding models: {last}", suggested=budget
    )
