"""Presburger formulas over the naturals.

Terms are constants, variables, sums and differences; atoms compare a term
with zero. Formulas are built from atoms with ``And``/``Or`` and the two
quantifiers; there is no negation node, :func:`negate` pushes negation down
to the atoms instead.

Variables range over the naturals while terms may go negative.
"""
from __future__ import annotations

import enum
import itertools
import re
import weakref
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

import z3

from .errors import ModelError, UnassignedVariable, UntrimmedGrammar

# --- syntax -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Const:
    value: int


@dataclass(frozen=True, eq=False)
class Var:
    name: str


@dataclass(frozen=True, eq=False)
class Add:
    args: tuple


@dataclass(frozen=True, eq=False)
class Sub:
    left: object
    right: object


OPS = ("<=", "<", "=", "!=", ">", ">=")
_NEG = {"<=": ">", "<": ">=", "=": "!=", "!=": "=", ">": "<=", ">=": "<"}


@dataclass(frozen=True, eq=False)
class Atom:
    """``term op 0``."""

    term: object
    op: str

    def __post_init__(self):
        if self.op not in OPS:
            raise ModelError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True, eq=False)
class And:
    args: tuple


@dataclass(frozen=True, eq=False)
class Or:
    args: tuple


@dataclass(frozen=True, eq=False)
class Exists:
    vars: tuple
    body: object


@dataclass(frozen=True, eq=False)
class ForAll:
    vars: tuple
    body: object


TRUE_F = And(())
FALSE_F = Or(())


def var(name: str) -> Var:
    return Var(name)


def const(value: int) -> Const:
    return Const(int(value))


def add(*terms) -> object:
    terms = tuple(terms)
    if not terms:
        return Const(0)
    return terms[0] if len(terms) == 1 else Add(terms)


def scaled(coef: int, term) -> object:
    """``coef * term`` as a sum (``coef >= 0``)."""
    if coef < 0:
        raise ValueError("coefficient must be natural")
    return add(*([term] * coef))


def eq(a, b=None) -> Atom:
    return Atom(a if b is None else Sub(a, b), "=")


def ge(a, b=None) -> Atom:
    return Atom(a if b is None else Sub(a, b), ">=")


def conj(*fs):
    flat = []
    for f in fs:
        if isinstance(f, And):
            flat.extend(f.args)
        else:
            flat.append(f)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*fs):
    flat = []
    for f in fs:
        if isinstance(f, Or):
            flat.extend(f.args)
        else:
            flat.append(f)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def exists(names, body):
    names = tuple(names)
    return Exists(names, body) if names else body


@dataclass(frozen=True, eq=False)
class PresburgerFormula:
    """A formula together with the ordered list of its free variables."""

    free: tuple
    body: object

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(self.free))
        if len(set(self.free)) != len(self.free):
            raise ModelError("free variables must be distinct")
        _check_binding(self.body, set(self.free), set(self.free))

    def size(self) -> int:
        return formula_size(self.body)

    def existential_vars(self) -> list:
        return [v for node in _walk(self.body) if isinstance(node, Exists) for v in node.vars]

    def universal_vars(self) -> list:
        return [v for node in _walk(self.body) if isinstance(node, ForAll) for v in node.vars]

    @property
    def existential_only(self) -> bool:
        return not any(isinstance(n, ForAll) for n in _walk(self.body))

    @property
    def quantifier_free(self) -> bool:
        return not any(isinstance(n, (Exists, ForAll)) for n in _walk(self.body))

    def __str__(self):
        return render(self.body)


def _walk(node):
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, (And, Or)):
            stack.extend(n.args)
        elif isinstance(n, (Exists, ForAll)):
            stack.append(n.body)


def _term_vars(t, out):
    if isinstance(t, Var):
        out.add(t.name)
    elif isinstance(t, Add):
        for a in t.args:
            _term_vars(a, out)
    elif isinstance(t, Sub):
        _term_vars(t.left, out)
        _term_vars(t.right, out)


def _check_binding(node, scope, free):
    # iterative to survive deep And/Or nests
    stack = [(node, frozenset(scope))]
    while stack:
        n, sc = stack.pop()
        if isinstance(n, Atom):
            names = set()
            _term_vars(n.term, names)
            missing = names - sc
            if missing:
                raise ModelError(f"variables {sorted(missing)} are neither free nor bound")
        elif isinstance(n, (And, Or)):
            stack.extend((a, sc) for a in n.args)
        elif isinstance(n, (Exists, ForAll)):
            if len(set(n.vars)) != len(n.vars) or sc & set(n.vars):
                raise ModelError(f"variables {n.vars} are bound twice along a path")
            stack.append((n.body, sc | set(n.vars)))
        else:
            raise ModelError(f"not a formula node: {n!r}")


def formula_size(node) -> int:
    """Number of symbols: connectives, quantified variables, atoms and term leaves."""
    total = 0
    for n in _walk(node):
        if isinstance(n, Atom):
            total += 1 + _term_size(n.term)
        elif isinstance(n, (And, Or)):
            total += max(1, len(n.args) - 1)
        else:
            total += len(n.vars)
    return total


def _term_size(t) -> int:
    if isinstance(t, Add):
        return len(t.args) - 1 + sum(_term_size(a) for a in t.args)
    if isinstance(t, Sub):
        return 1 + _term_size(t.left) + _term_size(t.right)
    return 1


def linear(t) -> tuple:
    """``(coefficients, constant)`` of a term."""
    coefs: Counter = Counter()
    k = 0
    stack = [(t, 1)]
    while stack:
        x, sign = stack.pop()
        if isinstance(x, Const):
            k += sign * x.value
        elif isinstance(x, Var):
            coefs[x.name] += sign
        elif isinstance(x, Add):
            stack.extend((a, sign) for a in x.args)
        elif isinstance(x, Sub):
            stack.append((x.left, sign))
            stack.append((x.right, -sign))
        else:
            raise ModelError(f"not a term: {x!r}")
    return {v: c for v, c in coefs.items() if c}, k


_LIN_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _lin(atom: Atom):
    hit = _LIN_CACHE.get(atom)
    if hit is None:
        hit = linear(atom.term)
        _LIN_CACHE[atom] = hit
    return hit


def _compare(value: int, op: str) -> bool:
    if op == "<=":
        return value <= 0
    if op == "<":
        return value < 0
    if op == "=":
        return value == 0
    if op == "!=":
        return value != 0
    if op == ">":
        return value > 0
    return value >= 0


def render(node) -> str:
    if isinstance(node, Atom):
        return f"{render_term(node.term)} {node.op} 0"
    if isinstance(node, And):
        return "true" if not node.args else "(" + " & ".join(render(a) for a in node.args) + ")"
    if isinstance(node, Or):
        return "false" if not node.args else "(" + " | ".join(render(a) for a in node.args) + ")"
    q = "E" if isinstance(node, Exists) else "A"
    return f"{q} {' '.join(node.vars)}. {render(node.body)}"


def render_term(t) -> str:
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Add):
        return "(" + " + ".join(render_term(a) for a in t.args) + ")"
    return f"({render_term(t.left)} - {render_term(t.right)})"


# --- negation -------------------------------------------------------------


def negate_node(node):
    if isinstance(node, Atom):
        return Atom(node.term, _NEG[node.op])
    if isinstance(node, And):
        return Or(tuple(negate_node(a) for a in node.args))
    if isinstance(node, Or):
        return And(tuple(negate_node(a) for a in node.args))
    if isinstance(node, Exists):
        return ForAll(node.vars, negate_node(node.body))
    return Exists(node.vars, negate_node(node.body))


def negate(phi: PresburgerFormula) -> PresburgerFormula:
    """Negation pushed to the atoms (De Morgan and quantifier duality)."""
    return PresburgerFormula(phi.free, negate_node(phi.body))


# --- evaluation -----------------------------------------------------------


class Truth(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __bool__(self):
        return self is Truth.TRUE

    @classmethod
    def of(cls, b: bool) -> "Truth":
        return cls.TRUE if b else cls.FALSE


def _and3(vals):
    out = Truth.TRUE
    for v in vals:
        if v is Truth.FALSE:
            return Truth.FALSE
        if v is Truth.UNKNOWN:
            out = Truth.UNKNOWN
    return out


def _or3(vals):
    out = Truth.FALSE
    for v in vals:
        if v is Truth.TRUE:
            return Truth.TRUE
        if v is Truth.UNKNOWN:
            out = Truth.UNKNOWN
    return out


def _eval_qf(node, env) -> bool:
    if isinstance(node, Atom):
        coefs, k = _lin(node)
        return _compare(k + sum(c * env[v] for v, c in coefs.items()), node.op)
    if isinstance(node, And):
        return all(_eval_qf(a, env) for a in node.args)
    if isinstance(node, Or):
        return any(_eval_qf(a, env) for a in node.args)
    raise ModelError("quantifier in a quantifier-free evaluation")


def _eval3(node, env, Q) -> Truth:
    # three-valued bounded instantiation
    if isinstance(node, Atom):
        return Truth.of(_eval_qf(node, env))
    if isinstance(node, And):
        return _and3(_eval3(a, env, Q) for a in node.args)
    if isinstance(node, Or):
        return _or3(_eval3(a, env, Q) for a in node.args)
    results = []
    for values in itertools.product(range(Q + 1), repeat=len(node.vars)):
        env2 = dict(env)
        env2.update(zip(node.vars, values))
        r = _eval3(node.body, env2, Q)
        if isinstance(node, Exists) and r is Truth.TRUE:
            return Truth.TRUE
        if isinstance(node, ForAll) and r is Truth.FALSE:
            return Truth.FALSE
        results.append(r)
    # nothing decisive within the bound
    return Truth.UNKNOWN


BRUTE_FORCE_LIMIT = 4096


def _instances(node, Q) -> int:
    # rough count of bounded instantiations
    total = 1
    for n in _walk(node):
        if isinstance(n, (Exists, ForAll)):
            total *= (Q + 1) ** len(n.vars)
            if total > BRUTE_FORCE_LIMIT:
                return total
    return total


def evaluate(phi: PresburgerFormula, assignment: Mapping, quantifier_bound: int = 0) -> Truth:
    """Evaluate under ``assignment``, instantiating quantifiers over ``[0, Q]``.

    Quantifier-free formulas are evaluated exactly. A witness found for an
    existential is exact, and so is a counterexample for a universal; when
    the bounded search is inconclusive the result is ``Truth.UNKNOWN``.
    """
    env = _assignment(phi, assignment)
    Q = int(quantifier_bound)
    if Q < 0:
        raise ValueError("quantifier bound must be >= 0")
    if phi.quantifier_free:
        return Truth.of(_eval_qf(phi.body, env))
    if _instances(phi.body, Q) <= BRUTE_FORCE_LIMIT:
        return _eval3(phi.body, env, Q)
    if phi.existential_only:
        return Truth.TRUE if _z3_check(phi, Q, env) else Truth.UNKNOWN
    # general alternation: the bounded semantics is two valued; only the
    # direction that is stable under larger bounds is reported exactly
    value = _z3_bounded_value(phi, Q, env)
    if not any(isinstance(n, Exists) for n in _walk(phi.body)):
        return Truth.UNKNOWN if value else Truth.FALSE
    return Truth.UNKNOWN


def _assignment(phi, assignment):
    env = {}
    for v in phi.free:
        if v not in assignment:
            raise UnassignedVariable(f"free variable {v!r} has no value")
        val = int(assignment[v])
        if val < 0:
            raise ValueError(f"variable {v!r} must be a natural number")
        env[v] = val
    return env


# --- z3 backend -----------------------------------------------------------


def _z3_atom(a: Atom, env):
    coefs, k = _lin(a)
    lhs = z3.Sum([c * env[v] for v, c in sorted(coefs.items())]) if coefs else z3.IntVal(0)
    rhs = z3.IntVal(-k)
    op = a.op
    if op == "<=":
        return lhs <= rhs
    if op == "<":
        return lhs < rhs
    if op == "=":
        return lhs == rhs
    if op == "!=":
        return lhs != rhs
    if op == ">":
        return lhs > rhs
    return lhs >= rhs


def _z3_quantified(node, env, Q):
    if isinstance(node, Atom):
        return _z3_atom(node, env)
    if isinstance(node, And):
        return z3.And([_z3_quantified(a, env, Q) for a in node.args]) if node.args else z3.BoolVal(True)
    if isinstance(node, Or):
        return z3.Or([_z3_quantified(a, env, Q) for a in node.args]) if node.args else z3.BoolVal(False)
    env2 = dict(env)
    cs = []
    for v in node.vars:
        c = z3.Int(v)
        env2[v] = c
        cs.append(c)
    rng = z3.And([z3.And(c >= 0, c <= Q) if Q is not None else c >= 0 for c in cs])
    body = _z3_quantified(node.body, env2, Q)
    if isinstance(node, Exists):
        return z3.Exists(cs, z3.And(rng, body))
    return z3.ForAll(cs, z3.Implies(rng, body))


class _Session:
    """Incremental solver with the formula body asserted once.

    Existential binders are hoisted to constants bounded by ``[0, Q]``. The
    body goes through SMT-LIB text, which z3 ingests much faster than a term
    built call by call from Python.
    """

    def __init__(self, phi, Q):
        body, hoisted = hoist_existentials(phi)
        lines = [f"(declare-const {smt_symbol(v)} Int)" for v in list(phi.free) + hoisted]
        for v in list(phi.free) + hoisted:
            lines.append(f"(assert (>= {smt_symbol(v)} 0))")
        if Q is not None:
            lines += [f"(assert (<= {smt_symbol(v)} {Q}))" for v in hoisted]
        args = body.args if isinstance(body, And) else (body,)
        lines += [f"(assert {_smt(a, None)})" for a in args]
        self.free = {v: z3.Int(v) for v in phi.free}
        self.solver = z3.SolverFor("QF_LIA")
        self.solver.add(z3.parse_smt2_string("\n".join(lines)))

    def check(self, extra):
        return self.solver.check(*extra)


_SESSIONS: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _session(phi, Q) -> _Session:
    per = _SESSIONS.setdefault(phi, {})
    s = per.get(Q)
    if s is None:
        s = per[Q] = _Session(phi, Q)
    return s


def _z3_check(phi, Q, env) -> bool:
    s = _session(phi, Q)
    extra = [s.free[v] == env[v] for v in phi.free]
    return s.check(extra) == z3.sat


def _z3_bounded_value(phi, Q, env) -> bool:
    consts = {v: z3.IntVal(env[v]) for v in phi.free}
    solver = z3.Solver()
    solver.add(_z3_quantified(phi.body, consts, Q))
    return solver.check() == z3.sat


# --- bounded box search ---------------------------------------------------


class ExhaustedBox:
    """No assignment of the free variables within the box satisfies the formula."""

    def __init__(self, bound):
        self.bound = bound

    def __bool__(self):
        return False

    def __repr__(self):
        return f"ExhaustedBox({self.bound})"


def inner_bound(phi: PresburgerFormula, K: int) -> int:
    """``Q = (K * n + 1) * (#existential variables + 2)``."""
    return (K * len(phi.free) + 1) * (len(phi.existential_vars()) + 2)


def solve_box(phi: PresburgerFormula, K: int, exclude: Iterable = (), quantifier_bound=None):
    """Least satisfying assignment in ``[0, K]^n`` (by sum, then lexicographic).

    Returns a tuple of values in the order of ``phi.free`` or
    :class:`ExhaustedBox`. ``exclude`` lists assignments to skip.
    """
    if not phi.existential_only:
        raise ModelError("solve_box needs an existential-only formula")
    if K < 0:
        raise ValueError("box bound must be >= 0")
    Q = inner_bound(phi, K) if quantifier_bound is None else quantifier_bound
    s = _session(phi, Q)
    xs = [s.free[v] for v in phi.free]
    box = [z3.And(x >= 0, x <= K) for x in xs]
    for point in exclude:
        box.append(z3.Or([x != int(p) for x, p in zip(xs, point)]) if xs else z3.BoolVal(False))
    if s.check(box) != z3.sat:
        return ExhaustedBox(K)
    total = z3.Sum(xs) if xs else z3.IntVal(0)
    # minimal sum, then lexicographically minimal coordinates
    fixed = list(box)
    best = _minimize(s, fixed, total)
    fixed.append(total == best)
    values = []
    for x in xs:
        v = _minimize(s, fixed, x)
        fixed.append(x == v)
        values.append(v)
    return tuple(values)


def _minimize(s: _Session, base, expr) -> int:
    """Least value of ``expr`` under ``base`` (which must be satisfiable,
    with the solver holding a model of it)."""
    hi = s.solver.model().eval(expr, model_completion=True).as_long()
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if s.check(base + [expr <= mid]) == z3.sat:
            hi = s.solver.model().eval(expr, model_completion=True).as_long()
        else:
            lo = mid + 1
    # leave a model of ``base`` with expr == hi behind for the next call
    s.check(base + [expr == hi])
    return hi


def brute_force_box(phi: PresburgerFormula, K: int, Q: int):
    """Reference box search by plain instantiation (small formulas only)."""
    from .words import sum_lex_order

    for point in sum_lex_order(len(phi.free), K):
        if evaluate(phi, dict(zip(phi.free, point)), Q):
            return point
    return ExhaustedBox(K)


# --- SMT-LIB --------------------------------------------------------------

_SIMPLE = re.compile(r"^[A-Za-z_~!@$%^&*+=<>.?/\-][A-Za-z0-9_~!@$%^&*+=<>.?/\-]*$")


def smt_symbol(name: str) -> str:
    return name if _SIMPLE.match(name) else "|" + name.replace("|", "_") + "|"


def _smt_term(t) -> str:
    if isinstance(t, Const):
        return str(t.value) if t.value >= 0 else f"(- {-t.value})"
    if isinstance(t, Var):
        return smt_symbol(t.name)
    if isinstance(t, Add):
        if len(t.args) == 1:
            return _smt_term(t.args[0])
        return "(+ " + " ".join(_smt_term(a) for a in t.args) + ")"
    return f"(- {_smt_term(t.left)} {_smt_term(t.right)})"


_SMT_OP = {"<=": "<=", "<": "<", "=": "=", ">": ">", ">=": ">="}


def _smt(node, rename) -> str:
    if isinstance(node, Atom):
        t = _smt_term(_rename_term(node.term, rename) if rename else node.term)
        if node.op == "!=":
            return f"(not (= {t} 0))"
        return f"({_SMT_OP[node.op]} {t} 0)"
    if isinstance(node, And):
        if not node.args:
            return "true"
        return _smt(node.args[0], rename) if len(node.args) == 1 else \
            "(and " + " ".join(_smt(a, rename) for a in node.args) + ")"
    if isinstance(node, Or):
        if not node.args:
            return "false"
        return _smt(node.args[0], rename) if len(node.args) == 1 else \
            "(or " + " ".join(_smt(a, rename) for a in node.args) + ")"
    decls = " ".join(f"({smt_symbol(v)} Int)" for v in node.vars)
    guards = " ".join(f"(>= {smt_symbol(v)} 0)" for v in node.vars)
    guard = guards if len(node.vars) == 1 else f"(and {guards})"
    body = _smt(node.body, rename)
    if isinstance(node, Exists):
        return f"(exists ({decls}) (and {guard} {body}))"
    return f"(forall ({decls}) (=> {guard} {body}))"


def _rename_term(t, rename):
    if isinstance(t, Var):
        return Var(rename.get(t.name, t.name))
    if isinstance(t, Add):
        return Add(tuple(_rename_term(a, rename) for a in t.args))
    if isinstance(t, Sub):
        return Sub(_rename_term(t.left, rename), _rename_term(t.right, rename))
    return t


def hoist_existentials(phi: PresburgerFormula):
    """Quantifier-free body and the list of hoisted variables.

    Binders reusing a name already taken are renamed with a numeric suffix so
    the hoisted constants are distinct.
    """
    if not phi.existential_only:
        raise ModelError("only existential formulas can be hoisted")
    taken = set(phi.free)
    hoisted = []

    def go(node, ren):
        if isinstance(node, Atom):
            return Atom(_rename_term(node.term, ren), node.op) if ren else node
        if isinstance(node, And):
            return And(tuple(go(a, ren) for a in node.args))
        if isinstance(node, Or):
            return Or(tuple(go(a, ren) for a in node.args))
        ren2 = dict(ren)
        for v in node.vars:
            name, k = v, 1
            while name in taken:
                k += 1
                name = f"{v}__{k}"
            taken.add(name)
            hoisted.append(name)
            if name != v:
                ren2[v] = name
            elif v in ren2:
                del ren2[v]
        return go(node.body, ren2)

    return go(phi.body, {}), hoisted


def to_smtlib(phi: PresburgerFormula, logic: str | None = None) -> str:
    """SMT-LIB v2 script for the satisfiability of ``phi``.

    ``QF_LIA`` hoists the existential block to constants (only possible for
    existential-only formulas); ``LIA`` keeps the quantifiers. By default the
    quantifier-free logic is chosen whenever it applies.
    """
    if logic is None:
        logic = "QF_LIA" if phi.existential_only else "LIA"
    if logic not in ("LIA", "QF_LIA"):
        raise ValueError(f"unsupported logic {logic!r}")
    lines = [f"(set-logic {logic})"]
    if logic == "QF_LIA":
        body, hoisted = hoist_existentials(phi)
        consts = list(phi.free) + hoisted
    else:
        body, consts = phi.body, list(phi.free)
    for v in consts:
        lines.append(f"(declare-const {smt_symbol(v)} Int)")
    for v in consts:
        lines.append(f"(assert (>= {smt_symbol(v)} 0))")
    if isinstance(body, And):
        for a in body.args:
            lines.append(f"(assert {_smt(a, None)})")
    else:
        lines.append(f"(assert {_smt(body, None)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


_DEFINE = re.compile(r"\(define-fun\s+(\|[^|]*\||[^\s()]+)\s+\(\)\s+Int\s+(\(-\s*\d+\)|-?\d+)\s*\)")


def parse_smt_model(text: str) -> dict:
    """Integer constants of a ``(get-model)`` answer."""
    out = {}
    for name, value in _DEFINE.findall(text):
        if name.startswith("|"):
            name = name[1:-1]
        value = value.replace("(", "").replace(")", "").replace(" ", "")
        out[name] = int(value)
    return out


def check_model(phi: PresburgerFormula, model: Mapping) -> Truth:
    """Re-evaluate ``phi`` under an external model.

    When the model also fixes every hoisted existential the body is checked
    directly; otherwise the free values are evaluated with the derived bound.
    """
    env = _assignment(phi, model)
    if phi.existential_only:
        body, hoisted = hoist_existentials(phi)
        if all(v in model for v in hoisted):
            full = dict(env)
            for v in hoisted:
                full[v] = int(model[v])
                if full[v] < 0:
                    return Truth.FALSE
            return Truth.of(_eval_qf(body, full))
    Q = inner_bound(phi, max(env.values(), default=0))
    return evaluate(phi, env, Q)


def check_smtlib_syntax(text: str) -> bool:
    """Parse a script with z3's SMT-LIB reader."""
    body = "\n".join(l for l in text.splitlines()
                     if not l.startswith(("(check-sat", "(get-model", "(set-logic")))
    try:
        z3.parse_smt2_string(body)
    except z3.Z3Exception:
        return False
    return _balanced(text)


def _balanced(text) -> bool:
    depth = 0
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


# --- Parikh images of grammars ------------------------------------------

_PREFIXES = itertools.count(1)


def parikh_formula(G, names=None, prefix=None) -> PresburgerFormula:
    """Existential formula whose models are the Parikh image of ``L(G)``.

    One variable ``y`` per production counts its uses. The terminal counters
    are sums over productions, every nonterminal balances produced and
    consumed occurrences (the start symbol once more), and a depth variable
    ``z`` per nonterminal asks each used nonterminal to be introduced by a
    used production whose left side is one step closer to the start symbol.
    That last part rules out unconnected cycles.
    """
    from .cfg import is_trimmed

    if not is_trimmed(G):
        raise UntrimmedGrammar("the grammar has useless symbols; trim it first")
    free = tuple(names) if names is not None else tuple(f"x{i}" for i in range(1, len(G.terminals) + 1))
    if len(free) != len(G.terminals):
        raise ModelError("one name per terminal is required")
    if not G.productions:
        return PresburgerFormula(free, FALSE_F)
    if prefix is None:
        prefix = f"p{next(_PREFIXES)}_"
    nts = list(G.nonterminals)
    nt_index = {n: i for i, n in enumerate(nts)}
    tindex = {t: i for i, t in enumerate(G.terminals)}
    prods = list(G.productions)
    y = [Var(f"{prefix}y{j}") for j in range(len(prods))]
    z = [Var(f"{prefix}z{i}") for i in range(len(nts))]
    parts = []
    # terminal counts
    tcount = [[] for _ in G.terminals]
    for j, (_, rhs) in enumerate(prods):
        for sym in rhs:
            if sym in tindex:
                tcount[tindex[sym]].append(y[j])
    for i, name in enumerate(free):
        parts.append(eq(Var(name), add(*tcount[i])))
    # flow balance
    produced = [[] for _ in nts]
    consumed = [[] for _ in nts]
    used_in = [[] for _ in nts]
    for j, (lhs, rhs) in enumerate(prods):
        consumed[nt_index[lhs]].append(y[j])
        for sym in rhs:
            if sym in nt_index:
                produced[nt_index[sym]].append(y[j])
        for sym in set(rhs):
            if sym in nt_index:
                used_in[nt_index[sym]].append(j)
    for i, n in enumerate(nts):
        offset = [Const(1)] if n == G.start else []
        parts.append(eq(add(*(offset + produced[i])), add(*consumed[i])))
    # connectivity through depth variables
    for i, n in enumerate(nts):
        if n == G.start:
            parts.append(eq(z[i], Const(1)))
            continue
        options = [conj(eq(add(*consumed[i])), eq(z[i]))]
        for j in used_in[i]:
            lz = z[nt_index[prods[j][0]]]
            options.append(conj(ge(y[j], Const(1)), ge(lz, Const(1)),
                                eq(z[i], add(lz, Const(1)))))
        parts.append(disj(*options))
    return PresburgerFormula(free, Exists(tuple(v.name for v in y + z), conj(*parts)))


