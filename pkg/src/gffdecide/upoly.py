"""Truncated power series over F_{p^m} on numpy coefficient arrays.

The order computations in maxorder grind through a lot of multiplications
of truncated series, which is too slow on boxed field elements.  A UPoly
stores the series as an (m, L) int64 array: row i holds the F_p
coefficients of u^0..u^{L-1} in the i-th coordinate of the basis
1, a, a^2, ... of F_{p^m}.  Multiplication is m^2 integer convolutions
followed by a reduction of the a-powers through a precomputed table; all
entries stay small enough that int64 never overflows at desk scale.

Everything is exact integer arithmetic; results are bit-for-bit
deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import DivisionByZero
from .ffield import FFElem

_red_cache = {}


def _reduction_table(field):
    """Row k = coordinates of gen^k in F_{p^m}, for k = 0..2m-2."""
    key = (field.p, field.m, field.modulus)
    tab = _red_cache.get(key)
    if tab is None:
        rows = []
        acc = field.one
        for _ in range(2 * field.m - 1):
            rows.append(acc.coeffs)
            acc = acc * field.gen
        tab = np.array(rows, dtype=np.int64)
        _red_cache[key] = tab
    return tab


class UPoly:
    """Truncated series over an FField, little-endian in u."""

    __slots__ = ("field", "arr")

    def __init__(self, field, arr):
        self.field = field
        self.arr = arr  # shape (m, L), int64, entries in [0, p)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field, np.zeros((field.m, 0), dtype=np.int64))

    @classmethod
    def one(cls, field):
        return cls.const(field, field.one)

    @classmethod
    def const(cls, field, a):
        arr = np.array([[c] for c in a.coeffs], dtype=np.int64)
        return cls(field, arr)

    @classmethod
    def from_elems(cls, field, elems):
        if not elems:
            return cls.zero(field)
        arr = np.array([[e.coeffs[i] for e in elems] for i in range(field.m)], dtype=np.int64)
        return cls(field, arr)

    @classmethod
    def monomial(cls, field, k, a=None):
        """a * u^k (a defaults to 1)."""
        a = field.one if a is None else a
        arr = np.zeros((field.m, k + 1), dtype=np.int64)
        arr[:, k] = a.coeffs
        return cls(field, arr)

    # -- queries ------------------------------------------------------------

    @property
    def length(self):
        return self.arr.shape[1]

    def is_zero(self):
        return not self.arr.any()

    def val(self):
        """Index of the first nonzero coefficient, or None."""
        nz = np.flatnonzero(self.arr.any(axis=0))
        return int(nz[0]) if nz.size else None

    def elem(self, j):
        """The u^j coefficient as an FFElem."""
        if j >= self.arr.shape[1]:
            return self.field.zero
        return FFElem(self.field, tuple(int(c) for c in self.arr[:, j]))

    def elems(self, upto=None):
        n = self.arr.shape[1] if upto is None else upto
        return [self.elem(j) for j in range(n)]

    def key(self):
        """Deterministic sort/compare key."""
        nz = np.flatnonzero(self.arr.any(axis=0))
        L = int(nz[-1]) + 1 if nz.size else 0
        return tuple(tuple(int(x) for x in row[:L]) for row in self.arr)

    def __eq__(self, other):
        return (
            isinstance(other, UPoly)
            and self.field == other.field
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.key()))

    def __repr__(self):
        return f"UPoly({self.key()})"

    # -- arithmetic ---------------------------------------------------------

    def trunc(self, N):
        if self.arr.shape[1] <= N:
            return self
        return UPoly(self.field, self.arr[:, :N])

    def __add__(self, other):
        L = max(self.length, other.length)
        a = np.zeros((self.field.m, L), dtype=np.int64)
        a[:, : self.length] += self.arr
        a[:, : other.length] += other.arr
        a %= self.field.p
        return UPoly(self.field, a)

    def __sub__(self, other):
        L = max(self.length, other.length)
        a = np.zeros((self.field.m, L), dtype=np.int64)
        a[:, : self.length] += self.arr
        a[:, : other.length] -= other.arr
        a %= self.field.p
        return UPoly(self.field, a)

    def __neg__(self):
        return UPoly(self.field, (-self.arr) % self.field.p)

    def mul(self, other, N):
        """Product truncated to N coefficients."""
        if self.is_zero() or other.is_zero():
            return UPoly.zero(self.field)
        m = self.field.m
        p = self.field.p
        La = min(self.length, N)
        Lb = min(other.length, N)
        L = min(La + Lb - 1, N)
        a = self.arr[:, :La]
        b = other.arr[:, :Lb]
        if m == 1:
            conv = np.convolve(a[0], b[0])[:L] % p
            return UPoly(self.field, conv.reshape(1, -1))
        bucket = np.zeros((2 * m - 1, L), dtype=np.int64)
        for i in range(m):
            if not a[i].any():
                continue
            for j in range(m):
                if not b[j].any():
                    continue
                c = np.convolve(a[i], b[j])[:L]
                bucket[i + j, : c.shape[0]] += c
        bucket %= p
        red = _reduction_table(self.field)
        out = (red.T @ bucket) % p
        return UPoly(self.field, out)

    def scale(self, a):
        """Multiply by a field element."""
        if a.is_zero() or self.is_zero():
            return UPoly.zero(self.field)
        return UPoly.const(self.field, a).mul(self, self.length)

    def shift_up(self, k):
        if k == 0 or self.is_zero():
            return self
        a = np.zeros((self.field.m, self.length + k), dtype=np.int64)
        a[:, k:] = self.arr
        return UPoly(self.field, a)

    def shift_down(self, k):
        """Divide by u^k; requires val >= k."""
        if k == 0:
            return self
        v = self.val()
        assert v is None or v >= k, "inexact division by a power of u"
        return UPoly(self.field, self.arr[:, k:])

    def unit_inv(self, N):
        """Inverse mod u^N of a series with val = 0, by Newton iteration."""
        c0 = self.elem(0)
        if c0.is_zero():
            raise DivisionByZero("unit_inv of a non-unit")
        inv = UPoly.const(self.field, c0.inverse())
        prec = 1
        two = UPoly.const(self.field, self.field.scalar(2))
        while prec < N:
            prec = min(2 * prec, N)
            t = self.trunc(prec).mul(inv, prec)
            inv = inv.mul(two - t, prec)
        return inv
