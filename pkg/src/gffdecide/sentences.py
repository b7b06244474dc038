"""Sentences of L_ring(K) and L_val(K): AST, parser, builders, evaluation.

Sentences are finite and/or-combinations of existential and universal
blocks over quantifier-free matrices.  Terms are built from sentence
variables, integer literals, the distinguished constants t and x-gen
(the curve generator), and constant fractions.  Surface syntax is
s-expressions; parse and print round-trip on canonical form.
"""

from __future__ import annotations

from .errors import (
    BudgetExceeded,
    ConstantNotInK,
    NotUnivExist,
    SentenceSyntaxError,
    UnknownVariable,
    ValuationAtomPresent,
)

RESERVED = {"t", "x-gen"}


# ---------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()

    def __mul__(self, other):
        return Mul(self, other)

    def __add__(self, other):
        return Add(self, other)

    def __sub__(self, other):
        return Sub(self, other)

    def __pow__(self, n):
        return Pow(self, n)


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def key(self):
        return ("var", self.name)


class Int(Term):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def key(self):
        return ("int", self.value)


class Add(Term):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def key(self):
        return ("+", self.a.key(), self.b.key())


class Sub(Term):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def key(self):
        return ("-", self.a.key(), self.b.key())


class Mul(Term):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def key(self):
        return ("*", self.a.key(), self.b.key())


class Pow(Term):
    __slots__ = ("a", "n")

    def __init__(self, a, n):
        self.a = a
        self.n = n

    def key(self):
        return ("^", self.a.key(), self.n)


class Div(Term):
    """A constant fraction; neither side may contain sentence variables."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def key(self):
        return ("/", self.a.key(), self.b.key())


def term_vars(term, out=None):
    """Free variable names of a term (excluding t and x-gen)."""
    if out is None:
        out = set()
    if isinstance(term, Var):
        if term.name not in RESERVED:
            out.add(term.name)
    elif isinstance(term, (Add, Sub, Mul, Div)):
        term_vars(term.a, out)
        term_vars(term.b, out)
    elif isinstance(term, Pow):
        term_vars(term.a, out)
    return out


def term_uses_K(term):
    """Does the term mention t, x-gen, or a fraction?"""
    if isinstance(term, Var):
        return term.name in RESERVED
    if isinstance(term, Div):
        return True
    if isinstance(term, (Add, Sub, Mul)):
        return term_uses_K(term.a) or term_uses_K(term.b)
    if isinstance(term, Pow):
        return term_uses_K(term.a)
    return False


def eval_term(term, env):
    """Evaluate a term in any commutative ring given by the environment.

    env maps variable names (including possibly 't' and 'x-gen') to ring
    elements, and carries the ring interface under 'scalar' (int -> elem)
    and 'invert' (elem -> elem).
    """
    if isinstance(term, Int):
        return env["scalar"](term.value)
    if isinstance(term, Var):
        if term.name not in env:
            raise UnknownVariable(f"unbound variable {term.name}")
        return env[term.name]
    if isinstance(term, Add):
        return eval_term(term.a, env) + eval_term(term.b, env)
    if isinstance(term, Sub):
        return eval_term(term.a, env) - eval_term(term.b, env)
    if isinstance(term, Mul):
        return eval_term(term.a, env) * eval_term(term.b, env)
    if isinstance(term, Pow):
        base = eval_term(term.a, env)
        out = env["scalar"](1)
        for _ in range(term.n):
            out = out * base
        return out
    if isinstance(term, Div):
        num = eval_term(term.a, env)
        den = eval_term(term.b, env)
        return num * env["invert"](den)
    raise AssertionError(f"unknown term node {term!r}")


# ---------------------------------------------------------------------------
# formulas


EQ, NEQ, IN_O, NOT_IN_O = "=", "!=", "in-O", "not-in-O"
_NEGATE_ATOM = {EQ: NEQ, NEQ: EQ, IN_O: NOT_IN_O, NOT_IN_O: IN_O}


class Atom:
    __slots__ = ("kind", "term")

    def __init__(self, kind, term):
        self.kind = kind
        self.term = term

    def negate(self):
        return Atom(_NEGATE_ATOM[self.kind], self.term)

    def key(self):
        return ("atom", self.kind, self.term.key())


class Not:
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def key(self):
        return ("not", self.a.key())


class And:
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def key(self):
        return ("and", self.a.key(), self.b.key())


class Or:
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def key(self):
        return ("or", self.a.key(), self.b.key())


class Exists:
    __slots__ = ("vars", "matrix")

    def __init__(self, vars, matrix):
        self.vars = tuple(vars)
        self.matrix = matrix

    def key(self):
        return ("exists", self.vars, self.matrix.key())


class Forall:
    __slots__ = ("vars", "matrix")

    def __init__(self, vars, matrix):
        self.vars = tuple(vars)
        self.matrix = matrix

    def key(self):
        return ("forall", self.vars, self.matrix.key())


def sentences_equal(a, b):
    return a.key() == b.key()


def classify(s):
    """'existential', 'universal', or 'universal-existential'."""
    if isinstance(s, Exists):
        return "existential"
    if isinstance(s, Forall):
        return "universal"
    if isinstance(s, (And, Or)):
        ka, kb = classify(s.a), classify(s.b)
        return ka if ka == kb else "universal-existential"
    if isinstance(s, Atom):
        return "existential"  # closed quantifier-free atoms count as either
    raise NotUnivExist(f"not a sentence node: {s!r}")


def negate_sentence(s):
    """Negation, staying inside the universal/existential class."""
    if isinstance(s, And):
        return Or(negate_sentence(s.a), negate_sentence(s.b))
    if isinstance(s, Or):
        return And(negate_sentence(s.a), negate_sentence(s.b))
    if isinstance(s, Exists):
        return Forall(s.vars, _negate_qf(s.matrix))
    if isinstance(s, Forall):
        return Exists(s.vars, _negate_qf(s.matrix))
    if isinstance(s, Atom):
        return s.negate()
    raise NotUnivExist(f"cannot negate {s!r}")


def _negate_qf(m):
    if isinstance(m, Atom):
        return m.negate()
    if isinstance(m, Not):
        return m.a
    if isinstance(m, And):
        return Or(_negate_qf(m.a), _negate_qf(m.b))
    if isinstance(m, Or):
        return And(_negate_qf(m.a), _negate_qf(m.b))
    raise NotUnivExist(f"quantifier inside a matrix: {m!r}")


# ---------------------------------------------------------------------------
# s-expression surface syntax


def _tokenize(text):
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append((c, i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append((text[i:j], i))
            i = j
    return out


def _read_sexp(tokens, pos):
    if pos >= len(tokens):
        raise SentenceSyntaxError("unexpected end of input", None)
    tok, at = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise SentenceSyntaxError("unexpected end of input", at)
            if tokens[pos][0] == ")":
                return items, pos + 1
            item, pos = _read_sexp(tokens, pos)
            items.append(item)
    if tok == ")":
        raise SentenceSyntaxError("unexpected )", at)
    return tok, pos + 1


def _is_int(tok):
    return isinstance(tok, str) and (tok.lstrip("-").isdigit() and tok.lstrip("-"))


def _parse_term(sx, bound):
    if isinstance(sx, str):
        if _is_int(sx):
            return Int(int(sx))
        if sx in RESERVED or sx in bound:
            return Var(sx)
        raise UnknownVariable(f"unknown variable or constant {sx!r}")
    if not sx:
        raise SentenceSyntaxError("empty term", None)
    op = sx[0]
    if op in ("+", "-", "*"):
        if len(sx) != 3:
            raise SentenceSyntaxError(f"{op} takes two arguments", None)
        a = _parse_term(sx[1], bound)
        b = _parse_term(sx[2], bound)
        return {"+": Add, "-": Sub, "*": Mul}[op](a, b)
    if op == "^":
        if len(sx) != 3 or not _is_int(sx[2]) or int(sx[2]) < 0:
            raise SentenceSyntaxError("^ takes a term and a nonnegative integer", None)
        return Pow(_parse_term(sx[1], bound), int(sx[2]))
    if op == "/":
        if len(sx) != 3:
            raise SentenceSyntaxError("/ takes two arguments", None)
        a = _parse_term(sx[1], set())
        b = _parse_term(sx[2], set())
        if term_vars(a) or term_vars(b):
            raise ConstantNotInK("fraction sides must be constants of K")
        return Div(a, b)
    raise SentenceSyntaxError(f"unknown term operator {op!r}", None)


def _parse_qf(sx, bound):
    if not isinstance(sx, list) or not sx:
        raise SentenceSyntaxError("expected a formula", None)
    op = sx[0]
    if op == "and" or op == "or":
        if len(sx) != 3:
            raise SentenceSyntaxError(f"{op} takes two arguments", None)
        cls = And if op == "and" else Or
        return cls(_parse_qf(sx[1], bound), _parse_qf(sx[2], bound))
    if op == "not":
        if len(sx) != 2:
            raise SentenceSyntaxError("not takes one argument", None)
        return Not(_parse_qf(sx[1], bound))
    if op in ("=", "!="):
        if len(sx) != 3 or sx[2] != "0":
            raise SentenceSyntaxError(f"atoms have the form ({op} term 0)", None)
        return Atom(EQ if op == "=" else NEQ, _parse_term(sx[1], bound))
    if op in ("in-O", "not-in-O"):
        if len(sx) != 2:
            raise SentenceSyntaxError(f"{op} takes one argument", None)
        return Atom(op, _parse_term(sx[1], bound))
    if op in ("exists", "forall"):
        # nested quantifiers parse fine; normalize rejects them later
        if len(sx) != 3 or not isinstance(sx[1], list):
            raise SentenceSyntaxError(f"{op} takes a variable list and a matrix", None)
        vars = []
        for v in sx[1]:
            if not isinstance(v, str) or _is_int(v) or v in RESERVED:
                raise SentenceSyntaxError(f"bad variable name {v!r}", None)
            vars.append(v)
        matrix = _parse_qf(sx[2], bound | set(vars))
        return (Exists if op == "exists" else Forall)(vars, matrix)
    raise SentenceSyntaxError(f"unknown operator {op!r}", None)


def _parse_sentence_sx(sx):
    if not isinstance(sx, list) or not sx:
        raise SentenceSyntaxError("expected a sentence", None)
    op = sx[0]
    if op in ("and", "or"):
        if len(sx) != 3:
            raise SentenceSyntaxError(f"{op} takes two arguments", None)
        cls = And if op == "and" else Or
        return cls(_parse_sentence_sx(sx[1]), _parse_sentence_sx(sx[2]))
    if op in ("exists", "forall"):
        if len(sx) != 3 or not isinstance(sx[1], list):
            raise SentenceSyntaxError(f"{op} takes a variable list and a matrix", None)
        vars = []
        for v in sx[1]:
            if not isinstance(v, str) or _is_int(v) or v in RESERVED:
                raise SentenceSyntaxError(f"bad variable name {v!r}", None)
            vars.append(v)
        if len(set(vars)) != len(vars):
            raise SentenceSyntaxError("duplicate bound variable", None)
        matrix = _parse_qf(sx[2], set(vars))
        cls = Exists if op == "exists" else Forall
        return cls(vars, matrix)
    # closed quantifier-free formulas are admitted as degenerate sentences
    return _parse_qf(sx, set())


def parse_sentence(text):
    """Parse the s-expression surface syntax into a sentence AST."""
    tokens = _tokenize(text)
    if not tokens:
        raise SentenceSyntaxError("empty input", 0)
    sx, pos = _read_sexp(tokens, 0)
    if pos != len(tokens):
        raise SentenceSyntaxError("trailing input", tokens[pos][1])
    return _parse_sentence_sx(sx)


def print_term(t):
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Add):
        return f"(+ {print_term(t.a)} {print_term(t.b)})"
    if isinstance(t, Sub):
        return f"(- {print_term(t.a)} {print_term(t.b)})"
    if isinstance(t, Mul):
        return f"(* {print_term(t.a)} {print_term(t.b)})"
    if isinstance(t, Pow):
        return f"(^ {print_term(t.a)} {t.n})"
    if isinstance(t, Div):
        return f"(/ {print_term(t.a)} {print_term(t.b)})"
    raise AssertionError(f"unknown term {t!r}")


def print_sentence(s):
    """Canonical s-expression text; parse(print(s)) equals s."""
    if isinstance(s, Atom):
        if s.kind in (EQ, NEQ):
            return f"({s.kind} {print_term(s.term)} 0)"
        return f"({s.kind} {print_term(s.term)})"
    if isinstance(s, Not):
        return f"(not {print_sentence(s.a)})"
    if isinstance(s, And):
        return f"(and {print_sentence(s.a)} {print_sentence(s.b)})"
    if isinstance(s, Or):
        return f"(or {print_sentence(s.a)} {print_sentence(s.b)})"
    if isinstance(s, Exists):
        return f"(exists ({' '.join(s.vars)}) {print_sentence(s.matrix)})"
    if isinstance(s, Forall):
        return f"(forall ({' '.join(s.vars)}) {print_sentence(s.matrix)})"
    raise AssertionError(f"unknown sentence {s!r}")


# ---------------------------------------------------------------------------
# normalization


class NormalSystem:
    """One quantifier block in DNF.

    polarity 'exists': the block holds iff some disjunct is satisfiable.
    polarity 'forall': disjuncts are the DNF of the NEGATED matrix; the
    block holds iff none of them is satisfiable.
    """

    __slots__ = ("vars", "disjuncts", "polarity")

    def __init__(self, vars, disjuncts, polarity):
        self.vars = tuple(vars)
        self.disjuncts = disjuncts  # list of list of Atom
        self.polarity = polarity

    def __repr__(self):
        return f"NormalSystem({self.polarity}, vars={self.vars}, {len(self.disjuncts)} disjuncts)"


class Skeleton:
    """Boolean combination tree whose leaves index into a system list."""

    __slots__ = ("op", "parts", "leaf")

    def __init__(self, op, parts=None, leaf=None):
        self.op = op  # 'and' | 'or' | 'leaf'
        self.parts = parts
        self.leaf = leaf


def _check_no_quantifier(m):
    if isinstance(m, Atom):
        return
    if isinstance(m, Not):
        _check_no_quantifier(m.a)
    elif isinstance(m, (And, Or)):
        _check_no_quantifier(m.a)
        _check_no_quantifier(m.b)
    elif isinstance(m, (Exists, Forall)):
        raise NotUnivExist("quantifier alternation inside a block")
    else:
        raise NotUnivExist(f"unexpected matrix node {m!r}")


def _to_dnf(m):
    """DNF of a quantifier-free matrix as a list of atom lists."""
    if isinstance(m, Atom):
        return [[m]]
    if isinstance(m, Not):
        return _to_dnf(_negate_qf(m.a))
    if isinstance(m, Or):
        return _to_dnf(m.a) + _to_dnf(m.b)
    if isinstance(m, And):
        left = _to_dnf(m.a)
        right = _to_dnf(m.b)
        return [la + ra for la in left for ra in right]
    raise NotUnivExist(f"unexpected matrix node {m!r}")


def normalize(s):
    """(systems, skeleton): DNF blocks plus the boolean combination tree."""
    systems = []

    def walk(node):
        if isinstance(node, (And, Or)):
            a = walk(node.a)
            b = walk(node.b)
            return Skeleton("and" if isinstance(node, And) else "or", parts=(a, b))
        if isinstance(node, Exists):
            _check_no_quantifier(node.matrix)
            systems.append(NormalSystem(node.vars, _to_dnf(node.matrix), "exists"))
            return Skeleton("leaf", leaf=len(systems) - 1)
        if isinstance(node, Forall):
            _check_no_quantifier(node.matrix)
            systems.append(
                NormalSystem(node.vars, _to_dnf(_negate_qf(node.matrix)), "forall")
            )
            return Skeleton("leaf", leaf=len(systems) - 1)
        if isinstance(node, (Atom, Not)):
            _check_no_quantifier(node)
            systems.append(NormalSystem((), _to_dnf(node), "exists"))
            return Skeleton("leaf", leaf=len(systems) - 1)
        raise NotUnivExist(f"not a universal/existential sentence: {node!r}")

    skeleton = walk(s)
    return systems, skeleton


def eval_skeleton(skeleton, leaf_values):
    if skeleton.op == "leaf":
        return leaf_values[skeleton.leaf]
    a = eval_skeleton(skeleton.parts[0], leaf_values)
    b = eval_skeleton(skeleton.parts[1], leaf_values)
    return (a and b) if skeleton.op == "and" else (a or b)


# ---------------------------------------------------------------------------
# named sentences


def _int_poly_root_exists(coeffs, var="w"):
    """The sentence: some w has sum coeffs[i] * w^i = 0 (integer coeffs)."""
    term = None
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = Pow(Var(var), i) if i else Int(1)
        piece = Mul(Int(c), mono) if c != 1 or i == 0 else mono
        term = piece if term is None else Add(term, piece)
    if term is None:
        term = Int(0)
    return Exists((var,), Atom(EQ, term))


def build_psi(q):
    """psi_q: the model has characteristic p and contains F_q.

    Encoded as p = 0 together with the existence of a root of the defining
    polynomial of F_q over F_p.
    """
    from .ffield import ff_make, is_prime

    p = None
    for cand in range(2, q + 1):
        if is_prime(cand):
            e = 0
            m = q
            while m % cand == 0:
                m //= cand
                e += 1
            if m == 1 and e >= 1:
                p = cand
                break
    if p is None:
        raise ValueError(f"{q} is not a prime power")
    e = 0
    m = q
    while m > 1:
        m //= p
        e += 1
    char_atom = Atom(EQ, Int(p))  # p * 1 = 0: the model has characteristic p
    if e == 1:
        return char_atom
    F = ff_make(p, e)
    root = _int_poly_root_exists([int(c) for c in F.modulus])
    return And(char_atom, root)


def build_chi(qprime):
    """chi_{q'}: the model is exactly F_{q'}.

    psi_{q'} forces a copy of F_{q'} inside the model; the universal part
    y^{q'} - y = 0 bounds the model's size by q'.  Together they pin the
    model to F_{q'} exactly.
    """
    upper = Forall(("y",), Atom(EQ, Sub(Pow(Var("y"), qprime), Var("y"))))
    return And(build_psi(qprime), upper)


def build_eta(spectrum):
    """eta_K: the conjunction of not-chi_{q'} over the exceptional sizes."""
    out = None
    for qp in spectrum.E:
        piece = negate_sentence(build_chi(qp))
        out = piece if out is None else And(out, piece)
    if out is None:
        return Forall(("y",), Atom(EQ, Int(0)))
    return out


def build_ur(p):
    """The UR(t) axiom: forall s, r ( r not in O -> (t - s^p) r^2 not in O )."""
    body = Or(
        Atom(IN_O, Var("r")),
        Atom(NOT_IN_O, Mul(Sub(Var("t"), Pow(Var("s"), p)), Pow(Var("r"), 2))),
    )
    return Forall(("s", "r"), body)


# ---------------------------------------------------------------------------
# finite-field evaluation


def eval_finite_field(s, F, budget=10**7):
    """Exact truth value of an L_ring sentence over a finite field."""

    def invert(a):
        if a.is_zero():
            raise ConstantNotInK("division by zero constant")
        return a.inverse()

    def count_vars(node):
        if isinstance(node, (Exists, Forall)):
            return len(node.vars) + count_vars(node.matrix)
        if isinstance(node, (And, Or)):
            return max(count_vars(node.a), count_vars(node.b))
        if isinstance(node, Not):
            return count_vars(node.a)
        return 0

    total = F.order ** count_vars(s)
    if total > budget:
        raise BudgetExceeded(
            f"{total} assignments exceed budget {budget}", required=total
        )

    def walk(node, env):
        if isinstance(node, Atom):
            if node.kind in (IN_O, NOT_IN_O):
                raise ValuationAtomPresent("valuation atom in a ring sentence")
            v = eval_term(node.term, env)
            return v.is_zero() if node.kind == EQ else not v.is_zero()
        if isinstance(node, Not):
            return not walk(node.a, env)
        if isinstance(node, And):
            return walk(node.a, env) and walk(node.b, env)
        if isinstance(node, Or):
            return walk(node.a, env) or walk(node.b, env)
        if isinstance(node, (Exists, Forall)):
            want_all = isinstance(node, Forall)
            vars = node.vars

            def rec(i):
                if i == len(vars):
                    return walk(node.matrix, env)
                for val in F.elements():
                    env[vars[i]] = val
                    got = rec(i + 1)
                    if got != want_all:
                        del env[vars[i]]
                        return got
                del env[vars[i]]
                return want_all

            return rec(0)
        raise NotUnivExist(f"not a sentence: {node!r}")

    return walk(s, {"scalar": F.scalar, "invert": invert})
