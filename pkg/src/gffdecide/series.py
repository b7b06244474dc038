"""Truncated Laurent series over a finite field, with precision tracking.

A series is stored as (valuation offset, coefficient tuple, absolute
precision).  Coefficients of u^n are known exactly for all n < prec; a
``prec`` of ``None`` means the series is an exact Laurent polynomial (all
higher coefficients are genuinely zero).  Operations propagate precision
and fail loudly with :class:`PrecisionExhausted` instead of guessing, so a
valuation read off a series is always certified.
"""

from __future__ import annotations

from .errors import DivisionByZero, FieldMismatch, PrecisionExhausted

INF = None  # sentinel for exact series


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LaurentSeries:
    """A truncated Laurent series over an FField."""

    __slots__ = ("field", "val", "coeffs", "prec")

    def __init__(self, field, val, coeffs, prec=INF):
        cs = list(coeffs)
        # normalize: strip leading zeros (raising val), trailing zeros if exact
        while cs and cs[0].is_zero():
            cs.pop(0)
            val += 1
        if prec is INF:
            while cs and cs[-1].is_zero():
                cs.pop()
        else:
            cs = cs[: max(0, prec - val)]
            while cs and cs[-1].is_zero():
                cs.pop()
        if not cs:
            val = 0
        self.field = field
        self.val = val
        self.coeffs = tuple(cs)
        self.prec = prec

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field, prec=INF):
        return cls(field, 0, [], prec)

    @classmethod
    def one(cls, field, prec=INF):
        return cls(field, 0, [field.one], prec)

    @classmethod
    def uniformizer(cls, field, exponent=1, prec=INF):
        return cls(field, exponent, [field.one], prec)

    @classmethod
    def constant(cls, field, a, prec=INF):
        return cls(field, 0, [a], prec)

    @classmethod
    def from_int_coeffs(cls, field, val, ints, prec=INF):
        return cls(field, val, [field.scalar(c) for c in ints], prec)

    @classmethod
    def from_fpoly(cls, f, prec=INF):
        """Exact series from a polynomial in the uniformizer."""
        return cls(f.field, 0, list(f.coeffs), prec)

    # -- inspection ---------------------------------------------------------

    def is_exact(self):
        return self.prec is INF

    def is_known_zero(self):
        """True only for the exact zero series."""
        return not self.coeffs and self.prec is INF

    def indistinguishable_from_zero(self):
        return not self.coeffs

    def valuation(self):
        """Certified valuation; raises PrecisionExhausted on a fuzzy zero."""
        if self.coeffs:
            return self.val
        if self.prec is INF:
            raise ZeroDivisionError("valuation of the exact zero series")
        raise PrecisionExhausted(
            f"series indistinguishable from 0 at precision {self.prec}",
            suggested=2 * max(1, abs(self.prec)),
        )

    def coefficient(self, n):
        """Coefficient of u^n, certified against the precision bound."""
        if self.prec is not INF and n >= self.prec:
            raise PrecisionExhausted(
                f"coefficient of u^{n} not known at precision {self.prec}",
                suggested=2 * max(1, n + 1),
            )
        if self.val <= n < self.val + len(self.coeffs):
            return self.coeffs[n - self.val]
        return self.field.zero

    def rel_prec(self):
        """Number of known coefficients measured from the valuation."""
        if self.prec is INF:
            return INF
        return self.prec - self.val

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch("series over different coefficient fields")

    def __add__(self, other):
        self._check(other)
        prec = _min_prec(self.prec, other.prec)
        if not self.coeffs:
            return LaurentSeries(other.field, other.val, other.coeffs, prec)
        if not other.coeffs:
            return LaurentSeries(self.field, self.val, self.coeffs, prec)
        lo = min(self.val, other.val)
        hi = max(self.val + len(self.coeffs), other.val + len(other.coeffs))
        if prec is not INF:
            hi = min(hi, prec)
        cs = []
        for n in range(lo, hi):
            a = self.coeffs[n - self.val] if self.val <= n < self.val + len(self.coeffs) else self.field.zero
            b = other.coeffs[n - other.val] if other.val <= n < other.val + len(other.coeffs) else self.field.zero
            cs.append(a + b)
        return LaurentSeries(self.field, lo, cs, prec)

    def __neg__(self):
        return LaurentSeries(self.field, self.val, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if not self.coeffs or not other.coeffs:
            # product precision: a fuzzy zero keeps its absolute bound shifted
            if self.prec is INF and not self.coeffs:
                return LaurentSeries(self.field, 0, [], other.prec if not other.coeffs else INF)
            if other.prec is INF and not other.coeffs:
                return LaurentSeries(self.field, 0, [], self.prec)
            prec = None
            cands = []
            if self.prec is not INF:
                ov = other.val if other.coeffs else 0
                cands.append(self.prec + ov)
            if other.prec is not INF:
                cands.append(other.prec + (self.val if self.coeffs else 0))
            for c in cands:
                prec = c if prec is None else min(prec, c)
            return LaurentSeries(self.field, 0, [], prec)
        prec = None
        if self.prec is not INF:
            prec = self.prec + other.val
        if other.prec is not INF:
            p2 = other.prec + self.val
            prec = p2 if prec is None else min(prec, p2)
        lo = self.val + other.val
        n_out = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not INF and prec is not None:
            n_out = min(n_out, prec - lo)
        out = [self.field.zero] * max(0, n_out)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            jmax = min(len(other.coeffs), n_out - i)
            for j in range(jmax):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return LaurentSeries(self.field, lo, out, INF if prec is None else prec)

    def scale(self, a):
        return LaurentSeries(self.field, self.val, [c * a for c in self.coeffs], self.prec)

    def shift(self, k):
        """Multiply by u^k."""
        return LaurentSeries(
            self.field, self.val + k, self.coeffs, INF if self.prec is INF else self.prec + k
        )

    def inverse(self, rel_prec=None):
        """Multiplicative inverse to the given relative precision.

        For a truncated operand the natural relative precision is used; an
        exact operand needs rel_prec (default 32) since inverses are
        generally infinite.
        """
        if not self.coeffs:
            if self.prec is INF:
                raise DivisionByZero("inverse of the exact zero series")
            raise PrecisionExhausted(
                f"cannot invert a series indistinguishable from 0 at precision {self.prec}",
                suggested=2 * max(1, abs(self.prec)),
            )
        if rel_prec is None:
            rel_prec = self.rel_prec()
            if rel_prec is INF:
                rel_prec = 32
        n = len(self.coeffs)
        c0inv = self.coeffs[0].inverse()
        out = [self.field.zero] * rel_prec
        out[0] = c0inv
        for k in range(1, rel_prec):
            acc = self.field.zero
            for i in range(1, min(k, n - 1) + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out[k] = -c0inv * acc
        return LaurentSeries(self.field, -self.val, out, -self.val + rel_prec)

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse(
            None if other.prec is not INF else (self.rel_prec() if self.prec is not INF else 32)
        )

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        r = LaurentSeries.one(self.field)
        a = self
        while n:
            if n & 1:
                r = r * a
            a = a * a
            n >>= 1
        return r

    def truncate(self, prec):
        """Forget coefficients at or beyond u^prec."""
        new = _min_prec(self.prec, prec)
        return LaurentSeries(self.field, self.val, self.coeffs, new)

    def derivative(self):
        cs = []
        for i, c in enumerate(self.coeffs):
            n = self.val + i
            cs.append(c * self.field.scalar(n % self.field.p))
        return LaurentSeries(
            self.field,
            self.val - 1,
            cs,
            INF if self.prec is INF else self.prec - 1,
        )

    def compose(self, g, prec):
        """Substitute the uniformizer by g (val(g) >= 1), to precision prec."""
        gv = g.valuation()
        if gv < 1:
            raise ValueError("composition requires val(g) >= 1")
        # error bounds: unknown tail of self enters at exponent >= self.prec*gv
        if self.prec is not INF:
            prec = min(prec, self.prec * gv if self.prec >= 0 else prec)
        if g.prec is not INF:
            prec = min(prec, g.prec)
        one = LaurentSeries.one(self.field)
        acc = LaurentSeries.zero(self.field, prec)
        gpow = one.truncate(prec)
        # non-negative part by Horner from the top; negative part via inverse
        pos_coeffs = list(self.coeffs)
        v = self.val
        if v < 0:
            ginv = g.inverse(max(1, prec - g.valuation() * v + 4))
            for i, c in enumerate(self.coeffs):
                e = v + i
                if e < 0:
                    acc = acc + (ginv ** (-e)).scale(c).truncate(prec)
            pos_coeffs = [
                c for i, c in enumerate(self.coeffs) if v + i >= 0
            ]
            lead = 0
        else:
            lead = v
        horner = LaurentSeries.zero(self.field, prec)
        for c in reversed(pos_coeffs):
            horner = (horner * g).truncate(prec) + LaurentSeries.constant(self.field, c, prec)
        if v < 0:
            # pos_coeffs start at exponent 0
            acc = acc + horner.truncate(prec)
        else:
            acc = acc + (horner * (g**lead)).truncate(prec)
        return acc.truncate(prec)

    def reversion(self, prec):
        """Compositional inverse R with self(R) = u + O(u^prec); val must be 1."""
        if self.valuation() != 1:
            raise ValueError("reversion requires valuation exactly 1")
        F = self.field
        c1 = self.coefficient(1)
        R = LaurentSeries(F, 1, [c1.inverse()], 2)
        u = LaurentSeries.uniformizer(F, 1, prec)
        k = 2
        while k < prec + 1:
            k = min(2 * k, prec + 1)
            Rk = LaurentSeries(F, R.val, R.coeffs, k)
            err = self.compose(Rk, k) - u.truncate(k)
            dcomp = self.derivative().compose(Rk, k)
            Rk = Rk - (err * dcomp.inverse(k)).truncate(k)
            R = Rk
        return LaurentSeries(F, R.val, R.coeffs, prec)

    def map_field(self, target):
        from .ffield import ff_embed

        emb = ff_embed(self.field, target)
        return LaurentSeries(target, self.val, [emb(c) for c in self.coeffs], self.prec)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentSeries)
            and self.field == other.field
            and self.val == other.val
            and self.coeffs == other.coeffs
            and self.prec == other.prec
        )

    def __hash__(self):
        return hash((self.field, self.val, self.coeffs, self.prec))

    def agrees_with(self, other, prec):
        """True if the two series coincide on all exponents < prec."""
        d = self - other
        if not d.coeffs:
            return True
        if d.prec is not INF and d.prec < prec:
            raise PrecisionExhausted(
                f"cannot compare series beyond precision {d.prec}", suggested=prec
            )
        return d.val >= prec

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for i, c in enumerate(self.coeffs):
                if c.is_zero():
                    continue
                e = self.val + i
                cs = repr(c)
                if e == 0:
                    parts.append(cs)
                else:
                    us = "u" if e == 1 else f"u^{e}"
                    parts.append(us if cs == "1" else f"({cs})*{us}")
            body = " + ".join(parts) if parts else "0"
        if self.prec is INF:
            return body
        return f"{body} + O(u^{self.prec})"


def series_arith(a, b, op, rel_prec=None):
    """Binary/unary series operations keyed by name (add, mul, invert, divide)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "invert":
        return a.inverse(rel_prec)
    if op == "divide":
        return a / b
    raise ValueError(f"unknown op {op!r}")
