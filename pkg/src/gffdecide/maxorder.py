"""Maximal orders over F_q[[u]] and local decomposition of etale algebras.

Given a monic squarefree f over F_q((u)) with integral coefficients, the
algebra A = F_q[[u]][x]/(f) sits inside the product of the completions cut
out by the irreducible factors of f.  This module computes the maximal
order B of A (radical / idealizer iteration, all linear algebra over the
truncated ring F_q[u]/u^N), splits B into its connected components by
idempotent lifting, and reads off the ramification index, residue degree
and exact factor (characteristic polynomial of x) of each component.
Wildly ramified factors need no special treatment here, which is the point
of doing it this way.

Coefficients are UPoly values in the uniformizer u, reduced mod u^N.  The
certified window shrinks with every division by a power of u; orders and
components carry it explicitly as `valid` / `prec`.
"""

from __future__ import annotations

from .errors import PrecisionExhausted
from .fpoly import FPoly, poly_factor_ff
from .upoly import UPoly


class MaxOrderError(PrecisionExhausted):
    pass


# ---------------------------------------------------------------------------
# vectors of truncated series (coordinates in the A-basis 1, x, .., x^{n-1})


def vec_add(v, w):
    return [a + b for a, b in zip(v, w)]


def vec_sub(v, w):
    return [a - b for a, b in zip(v, w)]


def vec_scale(v, a, N):
    return [c.mul(a, N) for c in v]


def vec_shift_down(v, k):
    return [c.shift_down(k) for c in v]


def vec_is_zero(v, N):
    for c in v:
        x = c.val()
        if x is not None and x < N:
            return False
    return True


class LocalAlgebra:
    """A = (F[u]/u^N)[x]/(f) with f monic of degree n."""

    def __init__(self, field, fcoeffs, N):
        self.field = field
        self.N = N
        self.n = len(fcoeffs) - 1
        self.fcoeffs = [c.trunc(N) for c in fcoeffs]

    def zero_vec(self):
        z = UPoly.zero(self.field)
        return [z] * self.n

    def unit_vec(self, i):
        v = self.zero_vec()
        v[i] = UPoly.one(self.field)
        return v

    def mul(self, v, w):
        """Product of two A-elements given as coefficient vectors."""
        N = self.N
        n = self.n
        prod = [UPoly.zero(self.field)] * (2 * n - 1)
        for i, a in enumerate(v):
            if a.is_zero():
                continue
            for j, b in enumerate(w):
                if b.is_zero():
                    continue
                prod[i + j] = prod[i + j] + a.mul(b, N)
        # reduce modulo monic f
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if not c.is_zero():
                for i in range(n):
                    prod[k - n + i] = prod[k - n + i] - c.mul(self.fcoeffs[i], N)
        return [c.trunc(N) for c in prod[:n]]

    def mul_by_x(self, v):
        if self.n == 1:
            return [v[0].mul(-self.fcoeffs[0], self.N)]
        return self.mul(v, self.unit_vec(1))


def echelon(rows, n, N, field):
    """Triangularize a list of A-vectors over F[[u]] (mod u^N).

    Returns (col, pivot_val, row) triples with strictly increasing leading
    columns, each row normalized so its leading entry is a power of u, and
    reduced against the other pivots.  Entries with valuation >= N count
    as zero.
    """
    # each row carries the validity it has lost to divisions by powers of u;
    # entries at or above N - loss are elimination noise, not data
    work = [[list(r), 0] for r in rows]
    out = []
    for col in range(n):
        best = None
        bestval = None
        for idx, (r, loss) in enumerate(work):
            v = r[col].val()
            if v is not None and v < N - loss and (bestval is None or v < bestval):
                best, bestval = idx, v
        if best is None:
            continue
        piv, piv_loss = work.pop(best)
        v = bestval
        uinv = piv[col].shift_down(v).unit_inv(N)
        piv = vec_scale(piv, uinv, N)
        piv[col] = UPoly.monomial(field, v)  # force the exact pivot
        for item in work:
            r, loss = item
            w = r[col].val()
            if w is not None and w < N - loss:
                factor = r[col].shift_down(v)
                for j in range(n):
                    r[j] = r[j] - factor.mul(piv[j], N)
                item[1] = loss + v
        out.append((col, v, piv, piv_loss))
    # reduce entries against later pivots for a near-canonical form
    for i in range(len(out)):
        ci, vi, ri, li = out[i]
        for j in range(len(out)):
            if j == i:
                continue
            cj, vj, rj, lj = out[j]
            if cj <= ci:
                continue
            e = ri[cj]
            ev = e.val()
            if ev is not None and vj <= ev < N - li:
                q = e.shift_down(vj)
                for k in range(n):
                    ri[k] = ri[k] - q.mul(rj[k], N)
                li += vj
        out[i] = (ci, vi, ri, li)
    return [(c, v, r) for c, v, r, _ in out]


def solve_in_echelon(ech, vec, n, N):
    """Coordinates of vec in the echelon basis, or None if not in the lattice.

    Shifting down by a pivot valuation spends that much of the certified
    window, so the final membership residual is only tested above the
    accumulated loss.
    """
    if not ech:
        return None
    field = ech[0][2][0].field
    v = list(vec)
    coords = []
    loss = 0
    for col, pv, row in ech:
        e = v[col]
        ev = e.val()
        if ev is None or ev >= N - loss:
            coords.append(UPoly.zero(field))
            continue
        if ev < pv:
            return None
        c = e.shift_down(pv)
        loss += pv
        coords.append(c.trunc(N))
        for j in range(n):
            v[j] = v[j] - c.mul(row[j], N)
    if not vec_is_zero(v, max(1, N - loss - 1)):
        return None
    return coords


def ff_kernel(rows, field):
    """Kernel vectors x with sum x_i rows[i] = 0, over the field F."""
    if not rows:
        return []
    m = len(rows[0])
    n = len(rows)
    mat = [list(r) for r in rows]
    aug = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    r = 0
    for col in range(m):
        sel = None
        for i in range(r, n):
            if not mat[i][col].is_zero():
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        aug[r], aug[sel] = aug[sel], aug[r]
        inv = mat[r][col].inverse()
        mat[r] = [c * inv for c in mat[r]]
        aug[r] = [c * inv for c in aug[r]]
        for i in range(n):
            if i != r and not mat[i][col].is_zero():
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        r += 1
        if r == n:
            break
    return [aug[i] for i in range(r, n)]


class QuotientAlgebra:
    """B/uB as a finite-dimensional commutative F-algebra."""

    def __init__(self, field, table, dim):
        self.field = field
        self.table = table  # table[i][j] = list of F coefficients, length dim
        self.dim = dim

    def mul(self, a, b):
        out = [self.field.zero] * self.dim
        for i, ai in enumerate(a):
            if ai.is_zero():
                continue
            for j, bj in enumerate(b):
                if bj.is_zero():
                    continue
                c = ai * bj
                for k, t in enumerate(self.table[i][j]):
                    if not t.is_zero():
                        out[k] = out[k] + c * t
        return out

    def power(self, a, e):
        r = None
        base = a
        while e:
            if e & 1:
                r = base if r is None else self.mul(r, base)
            base = self.mul(base, base)
            e >>= 1
        return r if r is not None else a

    def nilradical(self):
        """Basis of the nilradical, via an iterated q-power (F-linear) map."""
        q = self.field.order
        k = 1
        size = 1
        while size < self.dim:
            size *= q
            k += 1
        rows = []
        for i in range(self.dim):
            e = [self.field.zero] * self.dim
            e[i] = self.field.one
            rows.append(self.power(e, q**k))
        return ff_kernel(rows, self.field)


class Order:
    """A full-rank lattice u^{-s} * rowspace in A that is a ring.

    `valid` is the number of certified u-coefficients of the row entries;
    every u-division performed while constructing the order shrinks it.
    """

    def __init__(self, alg, ech, s, valid=None):
        self.alg = alg
        self.ech = ech  # list of (col, pval, row)
        self.s = s
        self.valid = alg.N if valid is None else valid

    @classmethod
    def initial(cls, alg):
        rows = [alg.unit_vec(i) for i in range(alg.n)]
        return cls(alg, echelon(rows, alg.n, alg.N, alg.field), 0, alg.N)

    def basis_vectors(self):
        return [r for _, _, r in self.ech]

    def strip(self):
        """Remove common powers of u shared by all entries, lowering s."""
        while self.s > 0:
            if any(c.val() == 0 for _, _, r in self.ech for c in r if not c.is_zero()):
                break
            new_rows = [vec_shift_down(r, 1) for _, _, r in self.ech]
            self.ech = echelon(new_rows, self.alg.n, self.valid, self.alg.field)
            self.s -= 1
        return self

    # basis elements are u^{-s} * row; the product of two of them is
    # u^{-2s} * (row_i * row_j), which must land back in u^{-s} * lattice.
    def quotient_algebra(self):
        """Structure constants of B/uB in the echelon basis."""
        alg = self.alg
        n = alg.n
        vecs = self.basis_vectors()
        dim = len(vecs)
        table = [[None] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                prod = alg.mul(vecs[i], vecs[j])  # = u^{2s} * (b_i b_j) in A coords
                shifted = []
                for c in prod:
                    v = c.val()
                    if v is not None and v < self.s:
                        raise MaxOrderError(
                            "order not closed under multiplication at this precision"
                        )
                    shifted.append(c.shift_down(self.s))
                coords = solve_in_echelon(self.ech, shifted, n, self.valid - self.s)
                if coords is None:
                    raise MaxOrderError("product fell outside the order lattice")
                entry = [c.elem(0) for c in coords]
                table[i][j] = entry
                table[j][i] = entry
        return QuotientAlgebra(alg.field, table, dim), vecs

    def element_times_vec(self, coords_mod_u, vecs):
        """Lift an F-coordinate vector (in the quotient basis) to an A-vector."""
        alg = self.alg
        out = alg.zero_vec()
        for c, v in zip(coords_mod_u, vecs):
            if not c.is_zero():
                out = vec_add(out, [x.scale(c) for x in v])
        return out


def _radical_lattice(order, quot, vecs):
    """Echelon rows of the u-radical J of the order (same denominator s)."""
    alg = order.alg
    nil = quot.nilradical()
    rows = [order.element_times_vec(coords, vecs) for coords in nil]
    u = UPoly.monomial(alg.field, 1)
    for v in vecs:
        rows.append(vec_scale(v, u, alg.N))
    return echelon(rows, alg.n, order.valid, alg.field)


def _idealizer(order, quot, vecs, jech):
    """New order (1/u) * {y in B : y J <= u J}, as an Order."""
    alg = order.alg
    n = alg.n
    s = order.s
    jvecs = [r for _, _, r in jech]
    # F-linear map: quotient basis element b_i  ->  (b_i * v_j mod uJ)_j
    rows = []
    for bi in vecs:
        image = []
        for vj in jvecs:
            prod = alg.mul(bi, vj)  # u^{2s} * (b_i v_j)
            shifted = []
            for c in prod:
                v = c.val()
                if v is not None and v < s:
                    raise MaxOrderError("radical product not integral")
                shifted.append(c.shift_down(s))
            coords = solve_in_echelon(jech, shifted, n, order.valid - s)
            if coords is None:
                raise MaxOrderError("radical is not an ideal at this precision")
            image.extend(c.elem(0) for c in coords)
        rows.append(image)
    sol = ff_kernel(rows, alg.field)
    new_rows = [order.element_times_vec(coords, vecs) for coords in sol]
    u = UPoly.monomial(alg.field, 1)
    for v in vecs:
        new_rows.append(vec_scale(v, u, alg.N))
    # these rows are u * (new order) in the old coordinates; denominator s+1
    valid = order.valid - s - 1
    new_order = Order(alg, echelon(new_rows, n, valid, alg.field), s + 1, valid)
    return new_order.strip()


def order_contains(order, vec, s_vec):
    """Does u^{-s_vec} * vec lie in the order's lattice?"""
    alg = order.alg
    d = order.s - s_vec
    if d >= 0:
        u_d = UPoly.monomial(alg.field, d)
        w = [c.mul(u_d, alg.N) for c in vec]
    else:
        w = []
        for c in vec:
            v = c.val()
            if v is not None and v < -d:
                return False
            w.append(c.shift_down(-d))
    prec = order.valid - max(order.s, s_vec) - 1
    return solve_in_echelon(order.ech, w, alg.n, prec) is not None


def orders_equal(o1, o2):
    if len(o1.ech) != len(o2.ech):
        return False
    for _, _, r in o1.ech:
        if not order_contains(o2, r, o1.s):
            return False
    for _, _, r in o2.ech:
        if not order_contains(o1, r, o2.s):
            return False
    return True


def maximal_order(alg, max_rounds=None):
    order = Order.initial(alg)
    if max_rounds is None:
        max_rounds = alg.N + 4
    for _ in range(max_rounds):
        if order.valid <= 2 * order.s + 6:
            raise MaxOrderError("precision exhausted during order enlargement")
        quot, vecs = order.quotient_algebra()
        jech = _radical_lattice(order, quot, vecs)
        new_order = _idealizer(order, quot, vecs, jech)
        if orders_equal(new_order, order):
            return order
        order = new_order
    raise MaxOrderError("maximal order iteration did not stabilize")


# ---------------------------------------------------------------------------
# idempotent splitting


def _identity_element(quot):
    F = quot.field
    dim = quot.dim
    basis = []
    for i in range(dim):
        e = [F.zero] * dim
        e[i] = F.one
        basis.append(e)
    # solve sum_i x_i (b_i * b_j) = b_j for all j
    rows = []
    for i in range(dim):
        images = []
        for j in range(dim):
            images.extend(quot.mul(basis[i], basis[j]))
        rows.append(images)
    target = []
    for j in range(dim):
        target.extend(basis[j])
    sol = _ff_solve(rows, target, F)
    assert sol is not None, "algebra has no identity"
    return sol


def _ff_solve(rows, target, field):
    """Solve sum x_i rows[i] = target over F, or None if inconsistent."""
    n = len(rows)
    m = len(target)
    A = [[rows[i][k] for i in range(n)] for k in range(m)]
    b = list(target)
    piv = []
    r = 0
    for c in range(n):
        sel = None
        for i in range(r, m):
            if not A[i][c].is_zero():
                sel = i
                break
        if sel is None:
            continue
        A[r], A[sel] = A[sel], A[r]
        b[r], b[sel] = b[sel], b[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        b[r] = b[r] * inv
        for i in range(m):
            if i != r and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
                b[i] = b[i] - f * b[r]
        piv.append(c)
        r += 1
    x = [field.zero] * n
    for i, c in enumerate(piv):
        x[c] = b[i]
    for i in range(r, m):
        if not b[i].is_zero():
            return None
    return x


def _min_poly_in_block(quot, e, xi, field):
    """Minimal polynomial of xi inside the unital block with identity e."""
    powers = [e]
    cur = e
    while True:
        cur = quot.mul(cur, xi)
        dep = ff_kernel([list(r) for r in powers + [cur]], field)
        if dep:
            coeffs = dep[0]
            lead = coeffs[-1]
            assert not lead.is_zero()
            inv = lead.inverse()
            return FPoly(field, [c * inv for c in coeffs])
        powers.append(cur)
        if len(powers) > quot.dim + 1:  # pragma: no cover
            raise AssertionError("minimal polynomial search overran dimension")


def _squarefree_part(m):
    d = m.derivative()
    if d.is_zero():
        from .fpoly import _pth_root_poly

        return _squarefree_part(_pth_root_poly(m))
    g = m.gcd(d)
    return (m // g).monic()


def _poly_invmod(a, m):
    """Inverse of a modulo m over a finite field, or None."""
    r0, r1 = m, a % m
    s0, s1 = FPoly.zero(m.field), FPoly.one(m.field)
    while not r1.is_zero():
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0.degree != 0:
        return None
    return s0.scale(r0.coeffs[0].inverse()) % m


def _eval_poly_at(quot, poly, e, xi):
    """Evaluate poly at xi inside the block with identity e (constants -> c*e)."""
    acc = [quot.field.zero] * quot.dim
    for c in reversed(poly.coeffs):
        acc = quot.mul(acc, xi)
        if not c.is_zero():
            acc = [a + c * v for a, v in zip(acc, e)]
    return acc


def _lift_idempotent_mod_nil(quot, e):
    """Iterate e <- 3e^2 - 2e^3 until exactly idempotent in quot."""
    F = quot.field
    three = F.scalar(3)
    two = F.scalar(2)
    for _ in range(quot.dim + 4):
        e2 = quot.mul(e, e)
        if all((a - b).is_zero() for a, b in zip(e2, e)):
            return e
        e3 = quot.mul(e2, e)
        e = [three * a - two * b for a, b in zip(e2, e3)]
    raise AssertionError("idempotent lifting mod nil failed")  # pragma: no cover


def _block_candidates(quot, e):
    """Deterministic stream of elements of the block e*quot to try to split."""
    F = quot.field
    dim = quot.dim
    cands = []
    for i in range(dim):
        b = [F.zero] * dim
        b[i] = F.one
        cands.append(quot.mul(e, b))
    for c in cands:
        yield c
    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            yield [a + b for a, b in zip(cands[i], cands[j])]
    # last resort: scalar-twisted pair sums
    for i in range(len(cands)):
        for j in range(len(cands)):
            if i == j:
                continue
            for lam in F.elements():
                if lam.is_zero() or lam == F.one:
                    continue
                yield [a + lam * b for a, b in zip(cands[i], cands[j])]


def _block_dim(quot, e):
    F = quot.field
    rows = []
    for i in range(quot.dim):
        b = [F.zero] * quot.dim
        b[i] = F.one
        rows.append(quot.mul(e, b))
    return quot.dim - len(ff_kernel(rows, F))


def _try_split_block(quot, e):
    """Split the block e*quot into >= 2 idempotents, or None if it is a field.

    An element with composite squarefree minimal polynomial yields CRT
    idempotents; an element whose squarefree minimal polynomial is
    irreducible of degree = dim of the block certifies a field.  The block
    is taken modulo its nilpotents throughout (squarefree parts).
    """
    F = quot.field
    dbl = _block_dim(quot, e)
    if dbl == 1:
        return None
    # the block is primitive iff its semisimple quotient is a field, so the
    # certificate degree discounts the block's share of the nilradical
    nil_rows = [quot.mul(e, v) for v in quot.nilradical()]
    nil_dbl = 0
    if nil_rows:
        nil_dbl = len(nil_rows) - len(ff_kernel(nil_rows, F))
    ss_dim = dbl - nil_dbl
    if ss_dim == 1:
        return None
    for xi in _block_candidates(quot, e):
        m = _squarefree_part(_min_poly_in_block(quot, e, xi, F))
        unit, factors = poly_factor_ff(m)
        if len(factors) >= 2:
            out = []
            for g, _ in factors:
                rest = FPoly.one(F)
                for h, _ in factors:
                    if h is not g:
                        rest = rest * h
                inv = _poly_invmod(rest, g)
                if inv is None:  # pragma: no cover
                    continue
                comb = (rest * inv) % m
                idem = _eval_poly_at(quot, comb, e, xi)
                out.append(_lift_idempotent_mod_nil(quot, idem))
            if len(out) >= 2:
                return out
        elif m.degree == ss_dim:
            return None  # generates the whole semisimple quotient: a field
    raise AssertionError("block neither split nor certified as a field")  # pragma: no cover


def _primitive_idempotents_quotient(quot):
    """Primitive idempotents of quot (exact idempotents of the algebra)."""
    blocks = [_identity_element(quot)]
    changed = True
    while changed:
        changed = False
        new_blocks = []
        for e in blocks:
            split = _try_split_block(quot, e)
            if split is None:
                new_blocks.append(e)
            else:
                new_blocks.extend(split)
                changed = True
        blocks = new_blocks
    return blocks


def _lift_idempotent_u_adic(alg, vec, s, N):
    """Lift an approximate idempotent (A-vector with denominator u^{-s}) u-adically.

    Returns (vector, valid): entries are only trustworthy below u^valid,
    since every division by u^s spends s coefficients of the window.
    """
    F = alg.field
    three = UPoly.const(F, F.scalar(3))
    two = UPoly.const(F, F.scalar(2))
    e = list(vec)
    valid = N
    for _ in range(N.bit_length() + 4):
        e2 = alg.mul(e, e)
        e2 = _require_shift(e2, s)
        valid -= 2 * s
        if valid <= 2:
            raise MaxOrderError("precision exhausted during idempotent lifting")
        diff = vec_sub(e2, e)
        if vec_is_zero(diff, valid):
            return e2, valid
        e3 = alg.mul(e2, e)
        e3 = _require_shift(e3, s)
        e = vec_sub(vec_scale(e2, three, alg.N), vec_scale(e3, two, alg.N))
    raise MaxOrderError("u-adic idempotent lifting did not converge")


def _require_shift(vec, s):
    out = []
    for c in vec:
        v = c.val()
        if v is not None and v < s:
            raise MaxOrderError("idempotent iterate left the order")
        out.append(c.shift_down(s))
    return out


# ---------------------------------------------------------------------------
# components


class LocalComponent:
    """One connected component of the maximal order: a complete DVR.

    Carries enough structure to expand elements of the component as Laurent
    series in a uniformizer over the residue field.
    """

    def __init__(self, alg, order, ech, idem, e, f_res, factor_coeffs, prec):
        self.alg = alg
        self.order = order
        self.ech = ech  # echelon basis of the component lattice (denominator order.s)
        self.idem = idem  # A-vector (denominator order.s)
        self.e = e
        self.f_res = f_res
        self.factor_coeffs = factor_coeffs  # UPoly list, monic in x
        self.prec = prec  # coefficients certified below u^prec
        self._expansion_ctx = None

    @property
    def rank(self):
        return len(self.ech)

    def pivot_loss(self):
        """Total pivot valuation of the component basis (solve-loss bound)."""
        return sum(pv for _, pv, _ in self.ech)

    def factor_series_coeffs(self, prec):
        """Factor coefficients as LaurentSeries known mod u^prec."""
        from .series import LaurentSeries

        return [
            LaurentSeries(self.alg.field, 0, c.elems(prec), prec)
            for c in self.factor_coeffs
        ]


def split_components(alg, order):
    """All LocalComponents of the maximal order, deterministically ordered."""
    quot, vecs = order.quotient_algebra()
    idems_mod_u = _primitive_idempotents_quotient(quot)
    s = order.s
    comps = []
    for coords in idems_mod_u:
        approx = order.element_times_vec(coords, vecs)
        idem, valid = _lift_idempotent_u_adic(alg, approx, s, order.valid)
        rows = []
        for v in vecs:
            prod = alg.mul(idem, v)
            rows.append(_require_shift(prod, s))
        valid -= s
        ech = echelon(rows, alg.n, valid - 1, alg.field)
        sub = Order(alg, ech, s, valid - 1)
        q2, v2 = sub.quotient_algebra()
        nil = q2.nilradical()
        n_i = len(ech)
        f_i = len(v2) - len(nil)
        if f_i < 1 or n_i % f_i != 0:
            raise MaxOrderError("component invariants inconsistent")
        e_i = n_i // f_i
        fac = _component_charpoly(alg, sub, valid - s - 1)
        comps.append(LocalComponent(alg, order, ech, idem, e_i, f_i, fac, valid - s - 1))
    comps.sort(key=lambda c: tuple(f.key() for f in c.factor_coeffs))
    if sum(c.rank for c in comps) != alg.n:
        raise MaxOrderError("component ranks do not sum to the degree")
    return comps


def _component_charpoly(alg, sub, N):
    """Characteristic polynomial of multiplication by x on the component."""
    vecs = sub.basis_vectors()
    n_i = len(vecs)
    cols = []
    for v in vecs:
        xv = alg.mul_by_x(v)
        coords = solve_in_echelon(sub.ech, xv, alg.n, N)
        if coords is None:
            raise MaxOrderError("x does not stabilize the component at this precision")
        cols.append(coords)
    zero = UPoly.zero(alg.field)
    one = UPoly.one(alg.field)
    # entries of zI - M as degree-<=1 polynomials in z with UPoly coefficients
    mat = [
        [[zero - cols[j][i], one if i == j else zero] for j in range(n_i)]
        for i in range(n_i)
    ]
    return [c.trunc(N) for c in _zpoly_det(mat, alg.field, N)]


def _zpoly_mul(a, b, field, N):
    out = [UPoly.zero(field)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if y.is_zero():
                continue
            out[i + j] = out[i + j] + x.mul(y, N)
    return out


def _zpoly_det(mat, field, N):
    """Determinant of a matrix of z-polynomials by minor expansion with memo."""
    n = len(mat)
    memo = {}

    def det(r, cols):
        if not cols:
            return [UPoly.one(field)]
        key = (r, cols)
        if key in memo:
            return memo[key]
        acc = None
        sign = 1
        for idx, c in enumerate(cols):
            entry = mat[r][c]
            if any(not x.is_zero() for x in entry):
                sub = det(r + 1, cols[:idx] + cols[idx + 1 :])
                term = _zpoly_mul(entry, sub, field, N)
                if sign < 0:
                    term = [UPoly.zero(field) - t for t in term]
                if acc is None:
                    acc = term
                else:
                    L = max(len(acc), len(term))
                    acc = [
                        (acc[k] if k < len(acc) else UPoly.zero(field))
                        + (term[k] if k < len(term) else UPoly.zero(field))
                        for k in range(L)
                    ]
            sign = -sign
        if acc is None:
            acc = [UPoly.zero(field)]
        memo[key] = acc
        return acc

    return det(0, tuple(range(n)))


# ---------------------------------------------------------------------------
# pi-adic expansions


def _upoly_det(mat, field, N):
    """Determinant of a square matrix of UPoly entries."""
    wrapped = [[[c] for c in row] for row in mat]
    return _zpoly_det(wrapped, field, N)[0]


class ComponentExpansion:
    """Coefficient stream of pi-adic expansions inside one component.

    The component is a complete discrete valuation ring with residue field
    F_Q, Q = q^{d * f_res}.  This object fixes an abstract model of F_Q, a
    Teichmuller lift of a residue generator, and a uniformizer pi, and then
    expands any integral element of the component as sum c_k pi^k with
    c_k in the Teichmuller lift of F_Q.
    """

    def __init__(self, comp):
        from .ffield import ff_make, ff_embed
        from .fpoly import is_irreducible, poly_roots

        self.comp = comp
        self.alg = comp.alg
        self.field = comp.alg.field
        self.s = comp.order.s
        self.n = comp.alg.n
        self.trust = comp.prec
        self.ech = comp.ech
        self.sub = Order(self.alg, comp.ech, self.s, comp.prec + self.s)
        quot, vecs = self.sub.quotient_algebra()
        self.quot = quot
        self.vecs = vecs
        self.nil = quot.nilradical()
        self.ident = _identity_element(quot)
        self.eps = comp.idem  # identity of the component as an A-vector
        F = self.field
        f_res = comp.f_res

        # residue generator: squarefree minimal polynomial irreducible of
        # degree f_res picks out a primitive element of the residue field
        xi = None
        mu = None
        for cand in _block_candidates(quot, self.ident):
            m = _min_poly_in_block(quot, self.ident, cand, F)
            mm = _squarefree_part(m)
            if mm.degree == f_res and is_irreducible(mm):
                xi = cand
                mu = mm
                break
        if xi is None:
            raise MaxOrderError("no residue-field generator found")
        self.mu = mu
        if f_res == 1:
            self.FQ = F
        else:
            self.FQ = ff_make(F.p, F.m * f_res)
        self.emb = ff_embed(F, self.FQ)
        mu_up = FPoly(self.FQ, [self.emb(c) for c in mu.coeffs])
        roots = poly_roots(mu_up)
        assert roots, "residue minimal polynomial has no root upstairs"
        self.theta_FQ = roots[0]

        # residue-coordinate solve basis: theta-bar powers then the nilradical
        pows = [self.ident]
        cur = self.ident
        for _ in range(1, f_res):
            cur = quot.mul(cur, xi)
            pows.append(cur)
        self.theta_res_powers = pows
        self.res_rows = [list(r) for r in pows] + [list(v) for v in self.nil]

        # Teichmuller lift: iterate theta -> theta^Q
        Q = F.order**f_res
        theta = self.sub.element_times_vec(xi, vecs)
        need = comp.e * (self.trust + self.s) + 1
        iters = 1
        while Q**iters < need:
            iters += 1
        for _ in range(iters + 2):
            nxt = self._pow(theta, Q)
            if vec_is_zero(vec_sub(nxt, theta), self._window()):
                theta = nxt
                break
            theta = nxt
        self.theta = theta
        chk = self._eval_const_poly(mu, theta)
        if not vec_is_zero(chk, self._window()):
            raise MaxOrderError("Teichmuller lift did not converge")

        # theta powers as A-vectors, for residue lifting
        self.theta_pows = [self.eps]
        cur = self.eps
        for _ in range(1, f_res):
            cur = self._mul(cur, theta)
            self.theta_pows.append(cur)

        # prime-field generator table for FQ -> sum a_i theta^i
        self.Fp = ff_make(F.p, 1)
        self.lift_gens = []
        self.lift_rows = []
        for i in range(f_res):
            base = self.theta_FQ**i if i else self.FQ.one
            for j in range(F.m):
                gel = F.gen**j if j else F.one
                prod = self.emb(gel) * base
                self.lift_gens.append((i, gel))
                self.lift_rows.append([self.Fp.elem([c]) for c in prod.coeffs])

        self._build_uniformizer()

    # -- element arithmetic (denominator-s A-vectors) -----------------------

    def _window(self):
        return max(self.trust - self.comp.pivot_loss() - 1, 1)

    def _chop(self, vec):
        t = self.trust
        return [c.trunc(t + self.s) for c in vec]

    def _mul(self, a, b):
        raw = self.alg.mul(a, b)
        out = []
        for c in raw:
            c = c.trunc(self.trust + 2 * self.s)
            v = c.val()
            if v is not None and v < self.s:
                raise MaxOrderError("product left the component lattice")
            out.append(c.shift_down(self.s))
        if self.s:
            self.trust -= self.s
        return out

    def _pow(self, a, k):
        result = None
        base = a
        while k:
            if k & 1:
                result = base if result is None else self._mul(result, base)
            k >>= 1
            if k:
                base = self._mul(base, base)
        return result if result is not None else self.eps

    def _scale_int(self, vec, n):
        a = self.field.scalar(n)
        return [c.scale(a) for c in vec]

    def _eval_const_poly(self, poly, at):
        """poly(at) with constant coefficients, inside the component."""
        acc = None
        for c in reversed(poly.coeffs):
            if acc is not None:
                acc = self._mul(acc, at)
            else:
                acc = self.alg.zero_vec()
            if not c.is_zero():
                acc = vec_add(acc, [x.scale(c) for x in self.eps])
        return acc

    # -- residue field ------------------------------------------------------

    def residue_coords(self, vec):
        """Component-basis coordinates of vec mod u, or None."""
        coords = solve_in_echelon(self.ech, self._chop(vec), self.n, self._window())
        if coords is None:
            return None
        return [c.elem(0) for c in coords]

    def residue(self, vec):
        """Image of an integral element in F_Q."""
        cvec = self.residue_coords(vec)
        if cvec is None:
            raise MaxOrderError("element left the component lattice")
        sol = _ff_solve(self.res_rows, cvec, self.field)
        assert sol is not None, "residue solve failed"
        out = self.FQ.zero
        for i in range(self.comp.f_res):
            base = self.theta_FQ**i if i else self.FQ.one
            out = out + self.emb(sol[i]) * base
        return out

    def lift(self, c):
        """Teichmuller-basis lift of c in F_Q into the component."""
        target = [self.Fp.elem([x]) for x in c.coeffs]
        sol = _ff_solve(self.lift_rows, target, self.Fp)
        assert sol is not None, "residue lift solve failed"
        out = self.alg.zero_vec()
        for coeff, (i, gel) in zip(sol, self.lift_gens):
            if coeff.is_zero():
                continue
            k = coeff.coeffs[0]
            scaled = [x.scale(self.field.elem([k]) * gel) for x in self.theta_pows[i]]
            out = vec_add(out, scaled)
        return out

    # -- uniformizer --------------------------------------------------------

    def _vw(self, vec):
        """Valuation of an integral element, normalized to v(pi) = 1."""
        mat = []
        win = self._window()
        for _, _, b in self.ech:
            prod = self.alg.mul(vec, b)
            shifted = []
            for c in prod:
                c = c.trunc(self.trust + 2 * self.s)
                v = c.val()
                if v is not None and v < self.s:
                    raise MaxOrderError("element does not stabilize the lattice")
                shifted.append(c.shift_down(self.s))
            coords = solve_in_echelon(self.ech, shifted, self.n, win)
            if coords is None:
                raise MaxOrderError("element does not stabilize the lattice")
            mat.append([c.trunc(win) for c in coords])
        cols = list(zip(*mat))
        det = _upoly_det([list(r) for r in cols], self.field, win)
        dv = det.val()
        if dv is None or dv % self.comp.f_res != 0:
            raise MaxOrderError("norm valuation not certified")
        return dv // self.comp.f_res

    def _build_uniformizer(self):
        jech = _radical_lattice(self.sub, self.quot, self.vecs)
        pi = None
        for _, _, row in jech:
            if self._vw(row) == 1:
                pi = [c.trunc(self.trust + self.s) for c in row]
                break
        if pi is None:
            raise MaxOrderError("no uniformizer found in the radical")
        self.pi = pi
        pe = self._pow(pi, self.comp.e)
        w = []
        for c in self._chop(pe):
            v = c.val()
            if v is not None and v < 1:
                raise MaxOrderError("pi^e is not divisible by u")
            w.append(c.shift_down(1))
        self.trust -= 1
        res_w = self.residue(w)
        if res_w.is_zero():
            raise MaxOrderError("pi^e / u is not a unit")
        z = self.lift(res_w.inverse())
        two_eps = self._scale_int(self.eps, 2)
        rounds = 1
        while (1 << rounds) < self.comp.e * (self.trust + 1):
            rounds += 1
        for _ in range(rounds + 1):
            wz = self._mul(w, z)
            err = vec_sub(wz, self.eps)
            if vec_is_zero(err, self._window()):
                break
            z = self._mul(z, vec_sub(two_eps, wz))
        self.w_inv = z
        if self.comp.e > 1:
            self.qvec = self._mul(self._pow(pi, self.comp.e - 1), z)
        else:
            self.qvec = z

    def _step(self, vec):
        """Divide an element of pi * component by pi."""
        raw = self.alg.mul(vec, self.qvec)
        out = []
        for c in raw:
            c = c.trunc(self.trust + 2 * self.s)
            v = c.val()
            if v is not None and v < self.s + 1:
                raise MaxOrderError("pi-division left the lattice")
            out.append(c.shift_down(self.s + 1))
        self.trust -= self.s + 1
        return out

    # -- expansion ----------------------------------------------------------

    def expand(self, vec, P):
        """First P coefficients (in F_Q) of the pi-expansion of vec."""
        gamma = vec
        out = []
        for _ in range(P):
            if self.trust <= self.s + self.comp.pivot_loss() + 3:
                raise MaxOrderError("precision exhausted during pi-expansion")
            c = self.residue(gamma)
            out.append(c)
            gamma = vec_sub(gamma, self.lift(c))
            gamma = self._step(gamma)
        return out

    def expand_u(self, P):
        """pi-expansion of the base uniformizer u (valuation e)."""
        vec = [c.shift_up(1) for c in self.eps]
        return self.expand(vec, P)

    def expand_x(self, P):
        """pi-expansion of the image of the algebra generator x."""
        vec = self.alg.mul_by_x(self.eps)
        return self.expand(vec, P)
