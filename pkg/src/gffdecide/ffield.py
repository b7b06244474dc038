"""Exact arithmetic in finite fields F_{p^m}.

Fields are represented as a single extension F_p[x]/(h) with h the first
monic irreducible polynomial of degree m in the deterministic candidate
order (coefficient vectors enumerated as base-p digits, least significant
digit = constant term).  Elements are immutable coefficient tuples of
length m over F_p.  Constant-field extensions are realized through
:func:`ff_embed` rather than towers.
"""

from __future__ import annotations

import functools
import itertools

from .errors import DegreeZero, DivisionByZero, FieldMismatch, NoEmbedding, NotPrime


def is_prime(n):
    """Trial-division primality test; adequate at desk scale."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimePower:
    """A prime power q = p^e with its factorization pinned down."""

    __slots__ = ("p", "e", "q")

    def __init__(self, p, e):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if e < 1:
            raise DegreeZero(f"exponent must be positive, got {e}")
        self.p = p
        self.e = e
        self.q = p**e

    @classmethod
    def from_q(cls, q):
        """Recover (p, e) from q, or raise NotPrime if q is not a prime power."""
        if q < 2:
            raise NotPrime(f"{q} is not a prime power")
        for p in range(2, q + 1):
            if q % p == 0:
                e = 0
                m = q
                while m % p == 0:
                    m //= p
                    e += 1
                if m != 1 or not is_prime(p):
                    raise NotPrime(f"{q} is not a prime power")
                return cls(p, e)
        raise NotPrime(f"{q} is not a prime power")

    def __eq__(self, other):
        return isinstance(other, PrimePower) and self.q == other.q

    def __hash__(self):
        return hash(("PrimePower", self.q))

    def __repr__(self):
        return f"PrimePower({self.p}, {self.e})"


# -- dense polynomial helpers over F_p (coefficient lists, little-endian) --


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1]
        if c:
            shift = len(a) - 1 - dm
            for i in range(dm):
                a[shift + i] = (a[shift + i] - c * m[i]) % p
        a.pop()
    return _ptrim(a)


def _ppowmod(a, n, m, p):
    r = [1]
    a = _pmod(a, m, p)
    while n:
        if n & 1:
            r = _pmod(_pmul(r, a, p), m, p)
        a = _pmod(_pmul(a, a, p), m, p)
        n >>= 1
    return r


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a = _pmod_nonmonic(a, b, p)
        a, b = b, a
    return a


def _pmod_nonmonic(a, b, p):
    inv = pow(b[-1], p - 2, p)
    bm = [(c * inv) % p for c in b]
    return _pmod(a, bm, p)


def _irreducible_fp(h, p):
    """Rabin irreducibility test for monic h over F_p."""
    m = len(h) - 1
    if m < 1:
        return False
    x = [0, 1]
    xq = _ppowmod(x, p**m, h, p)
    if _ptrim([(a - b) % p for a, b in itertools.zip_longest(xq, x, fillvalue=0)]):
        return False
    for r in set(_prime_factors(m)):
        xe = _ppowmod(x, p ** (m // r), h, p)
        diff = _ptrim([(a - b) % p for a, b in itertools.zip_longest(xe, x, fillvalue=0)])
        if not diff:
            return False
        if len(_pgcd(h, diff, p)) - 1 > 0:
            return False
    return True


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# fields up to this order carry exp/log tables so products are lookups
_TABLE_LIMIT = 4096


def _build_mul_tables(F):
    p, m, q = F.p, F.m, F.order
    mod = list(F.modulus)

    def mul(a, b):
        out = _pmod(_pmul(a, b, p), mod, p)
        return out + [0] * (m - len(out))

    def to_int(cs):
        n = 0
        for c in reversed(cs):
            n = n * p + c
        return n

    for g_int in range(1, q):
        g = list(F.from_int(g_int).coeffs)
        ints = [1]
        cur = [1] + [0] * (m - 1)
        ok = True
        for _ in range(q - 2):
            cur = mul(cur, g)
            n = to_int(cur)
            if n == 1:
                ok = False
                break
            ints.append(n)
        if ok:
            exp = [FFElem(F, tuple(F.from_int(n).coeffs)) for n in ints]
            log = [0] * q
            for k, n in enumerate(ints):
                log[n] = k
            return exp, log
    raise AssertionError("no multiplicative generator found")  # pragma: no cover


class FFElem:
    """An element of an FField, as an immutable coefficient tuple."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def is_zero(self):
        return not any(self.coeffs)

    def _check(self, other):
        if not isinstance(other, FFElem):
            raise FieldMismatch(f"cannot combine FFElem with {type(other).__name__}")
        if other.field is not self.field and other.field != self.field:
            raise FieldMismatch(f"elements of {self.field} and {other.field}")

    def __add__(self, other):
        self._check(other)
        p = self.field.p
        return FFElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        p = self.field.p
        return FFElem(self.field, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        p = self.field.p
        return FFElem(self.field, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other):
        self._check(other)
        F = self.field
        if F.m == 1:
            return FFElem(F, ((self.coeffs[0] * other.coeffs[0]) % F.p,))
        if F.order <= _TABLE_LIMIT:
            exp, log = F._mul_tables()
            i = self.to_int()
            j = other.to_int()
            if i == 0 or j == 0:
                return F.zero
            return exp[(log[i] + log[j]) % (F.order - 1)]
        prod = _pmul(list(self.coeffs), list(other.coeffs), F.p)
        red = _pmod(prod, list(F.modulus), F.p)
        red += [0] * (F.m - len(red))
        return FFElem(F, tuple(red))

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        F = self.field
        if F.m == 1:
            return FFElem(F, (pow(self.coeffs[0], F.p - 2, F.p),))
        if F.order <= _TABLE_LIMIT:
            exp, log = F._mul_tables()
            return exp[-log[self.to_int()] % (F.order - 1)]
        # a^(q-2) = a^-1
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("division by zero field element")
        return self * other.inverse()

    def __pow__(self, n):
        F = self.field
        if F.m == 1:
            if n < 0 and self.coeffs[0] == 0:
                raise DivisionByZero("inverse of zero")
            return FFElem(F, (pow(self.coeffs[0], n if n >= 0 else n % (F.p - 1), F.p),))
        if F.order <= _TABLE_LIMIT:
            if self.is_zero():
                if n < 0:
                    raise DivisionByZero("inverse of zero")
                return F.one if n == 0 else F.zero
            exp, log = F._mul_tables()
            return exp[(log[self.to_int()] * n) % (F.order - 1)]
        if n < 0:
            return self.inverse() ** (-n)
        r = F.one
        a = self
        while n:
            if n & 1:
                r = r * a
            a = a * a
            n >>= 1
        return r

    def pth_root(self):
        """The unique b with b^p = self (inverse Frobenius)."""
        F = self.field
        return self ** (F.p ** (F.m - 1))

    def frobenius(self):
        return self ** self.field.p

    def to_int(self):
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.p + c
        return n

    def __eq__(self, other):
        return (
            isinstance(other, FFElem)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.coeffs))

    def __repr__(self):
        if self.field.m == 1:
            return str(self.coeffs[0])
        terms = []
        for i in reversed(range(self.field.m)):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                xi = "a" if i == 1 else f"a^{i}"
                terms.append(xi if c == 1 else f"{c}*{xi}")
        return " + ".join(terms) if terms else "0"


class FField:
    """The finite field F_{p^m} with a fixed defining polynomial."""

    __slots__ = ("p", "m", "modulus", "order", "zero", "one", "gen", "_exp", "_log")

    def __init__(self, p, m, modulus):
        self.p = p
        self.m = m
        self.modulus = modulus  # monic, little-endian tuple of length m+1
        self.order = p**m
        self.zero = FFElem(self, (0,) * m)
        self.one = FFElem(self, (1,) + (0,) * (m - 1))
        if m == 1:
            self.gen = self.one
        else:
            self.gen = FFElem(self, (0, 1) + (0,) * (m - 2))
        self._exp = None
        self._log = None

    def _mul_tables(self):
        """Discrete exp/log tables for the multiplicative group (small fields)."""
        if self._exp is None:
            self._exp, self._log = _build_mul_tables(self)
        return self._exp, self._log

    def elem(self, coeffs):
        """Element from an iterable of F_p coefficients (low degree first)."""
        cs = [c % self.p for c in coeffs]
        if len(cs) > self.m:
            cs = _pmod(cs, list(self.modulus), self.p)
        cs += [0] * (self.m - len(cs))
        return FFElem(self, tuple(cs[: self.m]))

    def from_int(self, n):
        """Element whose coefficient vector is the base-p expansion of n."""
        n %= self.order
        cs = []
        for _ in range(self.m):
            cs.append(n % self.p)
            n //= self.p
        return FFElem(self, tuple(cs))

    def scalar(self, n):
        """The image of the integer n under Z -> F_p -> F_{p^m}."""
        return self.elem([n % self.p])

    def elements(self):
        """Deterministic stream of all p^m elements."""
        for n in range(self.order):
            yield self.from_int(n)

    def __eq__(self, other):
        return (
            isinstance(other, FField)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        return f"FField(p={self.p}, m={self.m})"


@functools.lru_cache(maxsize=None)
def ff_make(p, m):
    """Construct F_{p^m}; deterministic for fixed (p, m)."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise DegreeZero(f"degree must be >= 1, got {m}")
    if m == 1:
        return FField(p, 1, (0, 1))
    for n in range(p**m):
        cs = []
        k = n
        for _ in range(m):
            cs.append(k % p)
            k //= p
        h = cs + [1]
        if _irreducible_fp(h, p):
            return FField(p, m, tuple(h))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class Embedding:
    """A field embedding F_{p^d} -> F_{p^{dn}} fixing F_p."""

    __slots__ = ("source", "target", "gen_image")

    def __init__(self, source, target, gen_image):
        self.source = source
        self.target = target
        self.gen_image = gen_image

    def __call__(self, a):
        if a.field != self.source:
            raise FieldMismatch("element not in the embedding's source field")
        acc = self.target.zero
        for c in reversed(a.coeffs):
            acc = acc * self.gen_image + self.target.scalar(c)
        return acc

    def __repr__(self):
        return f"Embedding({self.source} -> {self.target})"


@functools.lru_cache(maxsize=None)
def ff_embed(source, target):
    """Embedding of one FField into another of multiple degree.

    The generator of the source maps to the lexicographically least root of
    the source's defining polynomial in the target.
    """
    if source.p != target.p:
        raise NoEmbedding("different characteristics")
    if target.m % source.m != 0:
        raise NoEmbedding(f"{source.m} does not divide {target.m}")
    if source == target:
        return Embedding(source, target, target.gen)
    mod = source.modulus
    for cand in target.elements():
        acc = target.zero
        for c in reversed(mod):
            acc = acc * cand + target.scalar(c)
        if acc.is_zero():
            return Embedding(source, target, cand)
    raise AssertionError("no root of defining polynomial found")  # pragma: no cover
