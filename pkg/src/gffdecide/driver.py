"""Global decision drivers over all or almost all completions of K.

A sentence is decided by (1) a registry of certified criteria, each with a
finite exceptional-place set and a recorded justification, or (2) a bounded
scan over places of low degree.  Statuses degrade honestly: certified
verdicts carry per-place evidence, bounded scans say so, and anything else
is Unknown with diagnostics.
"""

from __future__ import annotations

from .errors import (
    BudgetExceeded,
    CharTwo,
    PrecisionExhausted,
)
from .fpoly import FPoly, BiPoly, poly_factor_ff
from .funcfield import RationalPlace, rational_places
from .localeval import (
    DEFAULT_LOCAL_PRECISION,
    Verdict3,
    check_ur,
    completion_handle,
    decide_quadform,
    eval_exist_local,
)
from .sentences import (
    EQ,
    NEQ,
    Add,
    Atom,
    Div,
    Int,
    Mul,
    Pow,
    Sub,
    Var,
    build_ur,
    eval_term,
    normalize,
    sentences_equal,
    term_uses_K,
    term_vars,
)

DEFAULT_SCAN_BOUND = 4
DEFAULT_PLACE_BUDGET = 5000


class DriverConfig:
    __slots__ = ("scan_bound", "prec", "place_budget")

    def __init__(
        self,
        scan_bound=DEFAULT_SCAN_BOUND,
        prec=DEFAULT_LOCAL_PRECISION,
        place_budget=DEFAULT_PLACE_BUDGET,
    ):
        self.scan_bound = scan_bound
        self.prec = prec
        self.place_budget = place_budget


# ---------------------------------------------------------------------------
# verdicts


class GlobalVerdict:
    """Outcome of an all/almost-all decision with its evidence trail."""

    __slots__ = (
        "mode",
        "status",
        "criterion",
        "exceptional",
        "failures",
        "records",
        "bound",
        "diagnostics",
    )

    def __init__(
        self,
        mode,
        status,
        criterion=None,
        exceptional=None,
        failures=None,
        records=None,
        bound=None,
        diagnostics=None,
    ):
        assert mode in ("all", "almost-all")
        assert status in ("HoldsCertified", "FailsAt", "HoldsUpToBound", "Unknown")
        self.mode = mode
        self.status = status
        self.criterion = criterion
        self.exceptional = exceptional or []  # CurvePlace list
        self.failures = failures or []  # (CurvePlace, detail)
        self.records = records or []  # (CurvePlace, outcome string)
        self.bound = bound
        self.diagnostics = diagnostics or {}

    def __repr__(self):
        extra = f", criterion={self.criterion}" if self.criterion else ""
        return f"GlobalVerdict({self.mode}, {self.status}{extra})"


def _ser_detail(detail):
    if detail is None:
        return None
    if isinstance(detail, Verdict3):
        return {
            "outcome": detail.outcome,
            "certificate": _ser_cert(detail.certificate),
            "diagnostics": detail.diagnostics,
        }
    if isinstance(detail, list):
        return [_ser_detail(d) for d in detail]
    if isinstance(detail, tuple):
        return [_ser_detail(d) for d in detail]
    if isinstance(detail, dict):
        return {str(k): _ser_detail(v) for k, v in sorted(detail.items(), key=lambda kv: str(kv[0]))}
    return str(detail)


def _ser_cert(cert):
    from .localeval import WitnessCertificate

    if cert is None:
        return None
    if isinstance(cert, WitnessCertificate):
        return {
            "kind": "witness",
            "contact": cert.contact,
            "minor_val": cert.minor_val,
            "assignment": {v: str(s) for v, s in sorted(cert.assignment.items())},
        }
    return _ser_detail(cert)


def report(verdict):
    """Deterministic structured document for a GlobalVerdict."""
    return {
        "mode": verdict.mode,
        "status": verdict.status,
        "criterion": verdict.criterion,
        "bound": verdict.bound,
        "exceptional_places": [repr(p) for p in verdict.exceptional],
        "failures": [
            {"place": repr(p), "detail": _ser_detail(d)} for p, d in verdict.failures
        ],
        "records": [
            {"place": repr(p), "outcome": o} for p, o in verdict.records
        ],
        "diagnostics": _ser_detail(verdict.diagnostics),
    }


# ---------------------------------------------------------------------------
# per-place sentence evaluation


_OUTCOME_NEG = {"True": "False", "False": "True", "Unknown": "Unknown"}


def eval_sentence_at(function_field, handle, sentence, normalized=None):
    """Three-valued truth of a sentence in one completion.

    Returns (outcome string, list of per-leaf details).
    """
    if _is_ur_sentence(function_field, sentence):
        v = check_ur(handle)
        return v.outcome, [v]
    systems, skeleton = normalized if normalized is not None else normalize(sentence)
    outcomes = []
    details = []
    for sysm in systems:
        v = _eval_system(sysm, handle)
        o = v.outcome
        if sysm.polarity == "forall":
            o = _OUTCOME_NEG[o]
        outcomes.append(o)
        details.append(v)
    return _kleene(skeleton, outcomes), details


def _eval_system(sysm, handle):
    """One quantifier block at one completion, with exact shortcuts."""
    if sysm.polarity == "exists" and handle.FQ.p != 2:
        got = _match_diagonal(sysm)
        if got is not None and got[1] == 2:
            coeff_terms, _deg, neq_vars = got
            try:
                images = [handle.eval_term(c) for c in coeff_terms]
                iso = decide_quadform(images, handle)
            except (PrecisionExhausted, CharTwo):
                iso = None
            if iso is False:
                # only the zero vector solves the form; no disjunct holds
                return Verdict3("False", certificate=[("square-class", {})])
            if iso is True and neq_vars == set(sysm.vars):
                return Verdict3("True", certificate={"rule": "square-class"})
    return eval_exist_local(sysm, handle)


def _kleene(skel, vals):
    if skel.op == "leaf":
        return vals[skel.leaf]
    a = _kleene(skel.parts[0], vals)
    b = _kleene(skel.parts[1], vals)
    if skel.op == "and":
        if a == "False" or b == "False":
            return "False"
        if a == "True" and b == "True":
            return "True"
        return "Unknown"
    if a == "True" or b == "True":
        return "True"
    if a == "False" and b == "False":
        return "False"
    return "Unknown"


def _is_ur_sentence(function_field, sentence):
    return sentences_equal(sentence, build_ur(function_field.field.p))


# ---------------------------------------------------------------------------
# exceptional places from divisor support


class _Frac:
    """Fraction of BiPolys, for symbolic K-constant evaluation."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    def __add__(self, o):
        return _Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return _Frac(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        return _Frac(self.num * o.num, self.den * o.den)


def _frac_eval(term, field):
    one = BiPoly.const(field, field.one)

    def scalar(n):
        return _Frac(BiPoly.const(field, field.scalar(n)), one)

    def invert(f):
        return _Frac(f.den, f.num)

    env = {
        "scalar": scalar,
        "invert": invert,
        "t": _Frac(BiPoly.var_t(field), one),
        "x-gen": _Frac(BiPoly.var_x(field), one),
    }
    return eval_term(term, env)


def _resultant_x(f, g):
    """Res_x of two BiPolys as an FPoly in t (Sylvester determinant)."""
    fc = f.x_coefficients()
    gc = g.x_coefficients()
    n, m = len(fc) - 1, len(gc) - 1
    if n < 1 or m < 1:
        raise ValueError("resultant needs positive x-degrees")
    dim = n + m
    field = fc[0].field
    zero = FPoly.zero(field)
    rows = []
    for i in range(m):
        rows.append([zero] * i + list(reversed(fc)) + [zero] * (m - 1 - i))
    for i in range(n):
        rows.append([zero] * i + list(reversed(gc)) + [zero] * (n - 1 - i))
    return _fpoly_det(rows, field)


def _fpoly_det(rows, field):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    out = FPoly.zero(field)
    for j in range(n):
        a = rows[0][j]
        if a.is_zero():
            continue
        sub = _fpoly_det([r[:j] + r[j + 1 :] for r in rows[1:]], field)
        term = a * sub
        if j % 2 == 1:
            term = -term
        out = out + term
    return out


def _support_of_bipoly(function_field, g):
    """Base places where the K-element represented by g can vanish."""
    field = function_field.field
    out = set()
    if g.is_zero() or (g.deg_t <= 0 and g.deg_x <= 0):
        return out
    if g.deg_x <= 0:
        fp = g.x_coefficients()[0]
    else:
        fp = _resultant_x(function_field.curve, g)
        if fp.is_zero():
            return out  # g is a multiple of the curve, i.e. zero in K
    if not fp.is_zero() and fp.degree >= 1:
        _, factors = poly_factor_ff(fp)
        for irr, _mult in factors:
            if irr.degree >= 1:
                out.add(RationalPlace.finite(irr))
    out.add(RationalPlace.infinity(field))
    return out


def _constant_support(function_field, term):
    """Support of every maximal variable-free K-subterm of a term."""
    out = set()
    if not term_vars(term):
        if term_uses_K(term):
            fr = _frac_eval(term, function_field.field)
            out |= _support_of_bipoly(function_field, fr.num)
            out |= _support_of_bipoly(function_field, fr.den)
        return out
    if isinstance(term, (Add, Sub, Mul, Div)):
        out |= _constant_support(function_field, term.a)
        out |= _constant_support(function_field, term.b)
    elif isinstance(term, Pow):
        out |= _constant_support(function_field, term.a)
    return out


def _sentence_terms(sentence):
    from .sentences import And, Or, Not, Exists, Forall

    if isinstance(sentence, Atom):
        yield sentence.term
    elif isinstance(sentence, Not):
        yield from _sentence_terms(sentence.a)
    elif isinstance(sentence, (And, Or)):
        yield from _sentence_terms(sentence.a)
        yield from _sentence_terms(sentence.b)
    elif isinstance(sentence, (Exists, Forall)):
        yield from _sentence_terms(sentence.matrix)


def exceptional_places(function_field, sentence):
    """Ramified places plus divisor support of the sentence's K-constants."""
    base = set()
    for term in _sentence_terms(sentence):
        base |= _constant_support(function_field, term)
    out = {cp for cp in function_field.ramified_places()}
    for bp in sorted(base, key=RationalPlace.key):
        out.update(function_field.places_above(bp))
    return sorted(out, key=lambda cp: cp.key())


# ---------------------------------------------------------------------------
# certified criteria


class CriterionContext:
    __slots__ = ("identifier", "claim", "exceptional_base", "local_check", "notes")

    def __init__(self, identifier, claim, exceptional_base, local_check, notes):
        assert claim in ("holds-outside", "fails-infinitely")
        self.identifier = identifier
        self.claim = claim
        self.exceptional_base = exceptional_base  # RationalPlace list
        self.local_check = local_check  # handle -> (outcome, detail)
        self.notes = notes


class CertifiedCriterion:
    __slots__ = ("identifier", "justification", "_apply")

    def __init__(self, identifier, justification, apply_fn):
        self.identifier = identifier
        self.justification = justification
        self._apply = apply_fn

    def try_apply(self, function_field, sentence, systems, skeleton, config):
        return self._apply(self, function_field, sentence, systems, skeleton, config)


def _single_exists(systems, skeleton):
    if skeleton.op != "leaf" or len(systems) != 1:
        return None
    sysm = systems[0]
    if sysm.polarity != "exists":
        return None
    return sysm


def _apply_ur(crit, F, sentence, systems, skeleton, config):
    if not _is_ur_sentence(F, sentence):
        return None
    base = sorted({cp.base for cp in F.ramified_places()}, key=RationalPlace.key)

    def check(handle):
        v = check_ur(handle)
        return v.outcome, v

    return CriterionContext(
        crit.identifier, "holds-outside", base, check, crit.justification
    )


def _term_const_poly(term, var, field):
    """The term as an FPoly over F_q in one variable, or None."""

    def scalar(n):
        return FPoly(field, [field.scalar(n)])

    def invert(f):
        if f.degree > 0:
            raise ValueError("nonconstant inverse")
        return FPoly(field, [f.coeffs[0].inverse()])

    env = {"scalar": scalar, "invert": invert, var: FPoly.x(field)}
    try:
        return eval_term(term, env)
    except (ValueError, KeyError):
        return None


def _apply_const_univar(crit, F, sentence, systems, skeleton, config):
    sysm = _single_exists(systems, skeleton)
    if sysm is None or len(sysm.vars) != 1 or len(sysm.disjuncts) != 1:
        return None
    atoms = sysm.disjuncts[0]
    if len(atoms) != 1 or atoms[0].kind != EQ:
        return None
    term = atoms[0].term
    if term_uses_K(term):
        return None
    var = sysm.vars[0]
    poly = _term_const_poly(term, var, F.field)
    if poly is None or poly.degree > 4:
        return None
    if poly.is_zero():
        def check_t(handle):
            return "True", Verdict3("True", certificate={"root": "any"})
        return CriterionContext(
            crit.identifier, "holds-outside", [], check_t, "zero polynomial"
        )
    if poly.degree == 0:
        return CriterionContext(
            crit.identifier, "fails-infinitely", [], None,
            "nonzero constant equation has no root in any completion",
        )
    _, factors = poly_factor_ff(poly)
    degrees = sorted({irr.degree for irr, _ in factors})
    if 1 in degrees:
        def check(handle):
            return "True", Verdict3(
                "True", certificate={"note": "constant root in F_q"}
            )
        return CriterionContext(
            crit.identifier, "holds-outside", [], check,
            f"linear factor over F_q; factor degrees {degrees}",
        )
    return CriterionContext(
        crit.identifier, "fails-infinitely", [], None,
        f"no linear factor; factor degrees {degrees}: the set of residue "
        "degrees divisible by none of them is infinite, and all but finitely "
        "many residue degrees occur among the places of K",
    )


def _flatten_sum(term, out):
    if isinstance(term, Add):
        _flatten_sum(term.a, out)
        _flatten_sum(term.b, out)
    elif isinstance(term, Sub):
        _flatten_sum(term.a, out)
        out.append(Mul(Int(-1), term.b))
    else:
        out.append(term)


def _parse_diag_monomial(mono, vars):
    """(coefficient term, var, exponent) for c * v^d shapes, or None."""
    coeff = None
    power = None
    parts = [mono]
    while parts:
        p = parts.pop()
        if isinstance(p, Mul):
            parts.append(p.a)
            parts.append(p.b)
        elif isinstance(p, Pow) and isinstance(p.a, Var) and p.a.name in vars:
            if power is not None:
                return None
            power = (p.a.name, p.n)
        elif isinstance(p, Var) and p.name in vars:
            if power is not None:
                return None
            power = (p.name, 1)
        else:
            if term_vars(p):
                return None
            coeff = p if coeff is None else Mul(coeff, p)
    if power is None:
        return None
    return (coeff if coeff is not None else Int(1), power[0], power[1])


def _match_diagonal(sysm):
    """(coeff terms, degree) for a diagonal-form isotropy system, or None."""
    vars = set(sysm.vars)
    if len(vars) < 2 or not sysm.disjuncts:
        return None
    eq_key = None
    neq_vars = set()
    eq_atom = None
    for atoms in sysm.disjuncts:
        eqs = [a for a in atoms if a.kind == EQ]
        neqs = [a for a in atoms if a.kind == NEQ]
        if len(eqs) != 1 or len(neqs) != 1 or len(atoms) != 2:
            return None
        if not (isinstance(neqs[0].term, Var) and neqs[0].term.name in vars):
            return None
        neq_vars.add(neqs[0].term.name)
        k = eqs[0].term.key()
        if eq_key is None:
            eq_key = k
            eq_atom = eqs[0]
        elif k != eq_key:
            return None
    if not neq_vars:
        return None
    monos = []
    _flatten_sum(eq_atom.term, monos)
    seen = {}
    degree = None
    for mono in monos:
        got = _parse_diag_monomial(mono, vars)
        if got is None:
            return None
        coeff, v, d = got
        if v in seen:
            return None
        if degree is None:
            degree = d
        elif degree != d:
            return None
        seen[v] = coeff
    if set(seen) != vars or degree is None:
        return None
    return [seen[v] for v in sysm.vars], degree, neq_vars


def _diag_exceptional(F, coeff_terms):
    base = set()
    for c in coeff_terms:
        base |= _constant_support(F, c)
    base |= {cp.base for cp in F.ramified_places()}
    return sorted(base, key=RationalPlace.key)


def _apply_quadform(crit, F, sentence, systems, skeleton, config):
    if F.field.p == 2:
        return None
    sysm = _single_exists(systems, skeleton)
    if sysm is None:
        return None
    got = _match_diagonal(sysm)
    if got is None:
        return None
    coeff_terms, degree, _neq = got
    if degree != 2 or len(sysm.vars) < 3:
        return None

    def check(handle):
        try:
            images = [handle.eval_term(c) for c in coeff_terms]
            iso = decide_quadform(images, handle)
        except (PrecisionExhausted, CharTwo) as ex:
            return "Unknown", Verdict3("Unknown", diagnostics={"error": str(ex)})
        outcome = "True" if iso else "False"
        return outcome, Verdict3(outcome, certificate={"rule": "square-class"})

    return CriterionContext(
        crit.identifier,
        "holds-outside",
        _diag_exceptional(F, coeff_terms),
        check,
        crit.justification,
    )


def _apply_diag_cw(crit, F, sentence, systems, skeleton, config):
    sysm = _single_exists(systems, skeleton)
    if sysm is None:
        return None
    got = _match_diagonal(sysm)
    if got is None:
        return None
    coeff_terms, degree, _neq = got
    k = len(sysm.vars)
    if degree == 2:
        return None  # handled by the quadratic-form criterion
    if degree >= k or degree % F.field.p == 0:
        return None

    def check(handle):
        v = eval_exist_local(_copy_system(sysm), handle)
        return v.outcome, v

    return CriterionContext(
        crit.identifier,
        "holds-outside",
        _diag_exceptional(F, coeff_terms),
        check,
        crit.justification,
    )


def _copy_system(sysm):
    return sysm


CRITERIA = [
    CertifiedCriterion(
        "ur-unramified",
        "t - g^p has derivative 1 over F_p(t), hence is squarefree: the UR "
        "witness multiplicity is 1 at every finite place, and v(t) = -1 at "
        "infinity is prime to p; only ramified places can violate UR(t)",
        _apply_ur,
    ),
    CertifiedCriterion(
        "constant-univariate",
        "a polynomial over F_q has a root in a completion iff a factor degree "
        "divides the residue degree; the residue-degree spectrum of K is "
        "cofinite (Weil bound), so the verdict is uniform outside nothing "
        "or fails at infinitely many residue degrees",
        _apply_const_univar,
    ),
    CertifiedCriterion(
        "quadform-chevalley-warning",
        "a diagonal quadratic form in >= 3 variables whose coefficients are "
        "units is isotropic over the residue field (Chevalley-Warning) and "
        "lifts by Hensel in odd characteristic; only places in the "
        "coefficient support or ramified over F_q(t) can be exceptional",
        _apply_quadform,
    ),
    CertifiedCriterion(
        "diagonal-chevalley-warning",
        "a diagonal degree-d form in more than d variables with unit "
        "coefficients and p not dividing d has a smooth residue zero "
        "(Chevalley-Warning), lifting by Hensel; exceptional places are "
        "confined to the coefficient support and the ramified set",
        _apply_diag_cw,
    ),
]


# ---------------------------------------------------------------------------
# scanning


def scan_places(function_field, config):
    """Curve places over base places of degree <= scan_bound, budget-capped."""
    out = []
    for d in range(1, config.scan_bound + 1):
        for bp in rational_places(function_field.field, d):
            try:
                cps = function_field.places_above(bp)
            except PrecisionExhausted:
                continue
            for cp in cps:
                out.append(cp)
                if len(out) >= config.place_budget:
                    return out
    return out


def _eval_place(F, cp, sentence, normalized, config):
    try:
        handle = completion_handle(F, cp, config.prec)
        return eval_sentence_at(F, handle, sentence, normalized)
    except (PrecisionExhausted, BudgetExceeded) as ex:
        return "Unknown", [Verdict3("Unknown", diagnostics={"error": str(ex)})]


def _find_failures(F, sentence, normalized, config, limit=3):
    out = []
    for cp in scan_places(F, config):
        o, det = _eval_place(F, cp, sentence, normalized, config)
        if o == "False":
            out.append((cp, det))
            if len(out) >= limit:
                break
    return out


# ---------------------------------------------------------------------------
# drivers


def _decide(F, sentence, config, mode):
    systems, skeleton = normalize(sentence)
    normalized = (systems, skeleton)
    tried = []
    for crit in CRITERIA:
        ctx = crit.try_apply(F, sentence, systems, skeleton, config)
        tried.append(crit.identifier)
        if ctx is None:
            continue
        if ctx.claim == "fails-infinitely":
            sample = _find_failures(F, sentence, normalized, config)
            return GlobalVerdict(
                mode,
                "FailsAt",
                criterion=crit.identifier,
                failures=sample,
                diagnostics={"justification": ctx.notes, "criteria_tried": tried},
            )
        # holds outside a finite exceptional set
        exceptional = []
        records = []
        failures = []
        unknowns = []
        for bp in ctx.exceptional_base:
            try:
                cps = F.places_above(bp)
            except PrecisionExhausted:
                unknowns.append(bp)
                continue
            for cp in cps:
                exceptional.append(cp)
                try:
                    handle = completion_handle(F, cp, config.prec)
                    outcome, detail = ctx.local_check(handle)
                except (PrecisionExhausted, BudgetExceeded) as ex:
                    outcome, detail = "Unknown", Verdict3(
                        "Unknown", diagnostics={"error": str(ex)}
                    )
                records.append((cp, outcome))
                if outcome == "False":
                    failures.append((cp, detail))
                elif outcome == "Unknown":
                    unknowns.append(cp)
        diag = {"justification": ctx.notes, "criteria_tried": tried}
        if mode == "almost-all":
            # a finite exceptional set never threatens almost-all truth
            return GlobalVerdict(
                mode,
                "HoldsCertified",
                criterion=crit.identifier,
                exceptional=exceptional,
                failures=failures,
                records=records,
                diagnostics=diag,
            )
        if failures:
            return GlobalVerdict(
                mode,
                "FailsAt",
                criterion=crit.identifier,
                exceptional=exceptional,
                failures=failures,
                records=records,
                diagnostics=diag,
            )
        if unknowns:
            diag["undecided"] = [repr(u) for u in unknowns]
            return GlobalVerdict(
                mode,
                "Unknown",
                criterion=crit.identifier,
                exceptional=exceptional,
                records=records,
                diagnostics=diag,
            )
        return GlobalVerdict(
            mode,
            "HoldsCertified",
            criterion=crit.identifier,
            exceptional=exceptional,
            records=records,
            diagnostics=diag,
        )
    # no criterion fired: bounded scan
    records = []
    failures = []
    unknown_count = 0
    for cp in scan_places(F, config):
        outcome, details = _eval_place(F, cp, sentence, normalized, config)
        records.append((cp, outcome))
        if outcome == "False":
            failures.append((cp, details))
            if mode == "all" and len(failures) >= 3:
                # a universal claim is already refuted; sampling 3 suffices
                break
        elif outcome == "Unknown":
            unknown_count += 1
    diag = {"criteria_tried": tried, "unknown_places": unknown_count}
    if mode == "all" and failures:
        return GlobalVerdict(
            mode, "FailsAt", failures=failures, records=records, diagnostics=diag
        )
    if failures:
        # almost-all: a finite observed failure set proves nothing either way
        diag["note"] = (
            "finite scan cannot prove the failing set infinite; failures attached"
        )
        return GlobalVerdict(
            mode, "Unknown", failures=failures, records=records, diagnostics=diag
        )
    if unknown_count:
        return GlobalVerdict(mode, "Unknown", records=records, diagnostics=diag)
    return GlobalVerdict(
        mode,
        "HoldsUpToBound",
        bound=config.scan_bound,
        records=records,
        diagnostics=diag,
    )


def decide_almost_all(function_field, sentence, config=None):
    """Does the sentence hold in all but finitely many completions of K?"""
    return _decide(function_field, sentence, config or DriverConfig(), "almost-all")


def decide_all(function_field, sentence, config=None):
    """Does the sentence hold in every completion of K?"""
    return _decide(function_field, sentence, config or DriverConfig(), "all")
