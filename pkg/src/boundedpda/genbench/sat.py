"""3SAT instances and their reductions to bounded reachability.

Literals use the DIMACS convention: ``3`` is ``x3`` and ``-3`` its negation.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass

from ..errors import MalformedCnf
from ..frontends.flat import flat_bounded_expression
from ..frontends.models import Cfsm, CounterMachine, _Builder

NOP = ("nop",)


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        if self.num_vars < 0:
            raise MalformedCnf("negative variable count")
        for c in clauses:
            if not c:
                raise MalformedCnf("empty clause")
            if len(c) > 3:
                raise MalformedCnf(f"clause {c} has more than three literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise MalformedCnf(f"literal {lit} outside 1..{self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    def satisfied_by(self, assignment) -> bool:
        """``assignment[i - 1]`` is the value of ``x_i``."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def __str__(self):
        def lit(l):
            return f"x{l}" if l > 0 else f"¬x{-l}"
        return " ∧ ".join("(" + " ∨ ".join(map(lit, c)) + ")" for c in self.clauses) or "⊤"


def parse_dimacs(text: str) -> Cnf:
    header = None
    lits: list = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedCnf(f"bad problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise MalformedCnf(f"bad problem line {line!r}") from None
            continue
        if header is None:
            raise MalformedCnf("clause before the problem line")
        try:
            lits.extend(int(tok) for tok in line.split())
        except ValueError:
            raise MalformedCnf(f"non-integer literal in {line!r}") from None
    if header is None:
        raise MalformedCnf("missing problem line")
    clauses, cur = [], []
    for lit in lits:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        raise MalformedCnf("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise MalformedCnf(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], tuple(clauses))


_LIT = re.compile(r"^(¬|~|!|-)?\s*x(\d+)$")


def parse_cnf(text: str) -> Cnf:
    """Parse either DIMACS or the infix form ``(x1 ∨ ¬x2) ∧ (x3)``."""
    if re.search(r"^\s*p\s+cnf", text, re.M):
        return parse_dimacs(text)
    body = text.strip()
    if not body:
        return Cnf(0, ())
    clauses = []
    for part in re.split(r"∧|&|\band\b", body):
        part = part.strip().strip("()").strip()
        lits = []
        for tok in re.split(r"∨|\||\bor\b", part):
            m = _LIT.match(tok.strip())
            if not m:
                raise MalformedCnf(f"cannot read literal {tok.strip()!r}")
            v = int(m.group(2))
            lits.append(-v if m.group(1) else v)
        clauses.append(tuple(lits))
    n = max((abs(l) for c in clauses for l in c), default=0)
    return Cnf(n, tuple(clauses))


def _as_cnf(cnf) -> Cnf:
    if isinstance(cnf, Cnf):
        return cnf
    if isinstance(cnf, str):
        return parse_cnf(cnf)
    clauses = tuple(tuple(c) for c in cnf)
    return Cnf(max((abs(l) for c in clauses for l in c), default=0), clauses)


def brute_force_sat(cnf) -> tuple | None:
    """A satisfying assignment (tuple of bools) or ``None``."""
    cnf = _as_cnf(cnf)
    for bits in itertools.product((False, True), repeat=cnf.num_vars):
        if cnf.satisfied_by(bits):
            return bits
    return None


def random_cnf(rng: random.Random, max_vars: int = 4, max_clauses: int = 4) -> Cnf:
    """At most three literals per clause, over distinct variables."""
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(m):
        k = rng.randint(1, min(3, n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return Cnf(n, tuple(clauses))


def cnf_suite(seed: int = 0, count: int = 50, max_vars: int = 4, max_clauses: int = 4) -> list:
    rng = random.Random(seed)
    return [random_cnf(rng, max_vars, max_clauses) for _ in range(count)]


# --- gadgets ---------------------------------------------------------------


def _finish(b: _Builder, start, end, make):
    if not b.transitions:
        # nothing to do: a single idle loop keeps the bounded expression non-empty
        b.add("idle", start, NOP, start)
    M = make(b)
    return M, end, flat_bounded_expression(M, end)


def sat_to_cm(cnf):
    """Counter-machine reduction: returns ``(machine, s_f, bounded expression)``.

    Variable ``x_i`` sets ``f_x`` to one and may once swap it into ``t_x``.
    Clause ``j`` increments ``c_j`` once per literal whose opposite counter is
    zero, and finally decrements ``c_j``.
    """
    cnf = _as_cnf(cnf)
    b = _Builder()
    cur = b.state("s0")
    for i in range(1, cnf.num_vars + 1):
        t, f = f"t_x{i}", f"f_x{i}"
        q1, q2 = f"x{i}_set", f"x{i}_end"
        b.add(f"x{i}_false", cur, ("inc", f), q1)
        b.loop("sw", q1, [(f"x{i}_inc_t", ("inc", t)), (f"x{i}_dec_f", ("dec", f))])
        b.add(f"x{i}_next", q1, NOP, q2)
        cur = q2
    for j, clause in enumerate(cnf.clauses, 1):
        c = f"c{j}"
        for l, lit in enumerate(clause):
            r = b.state(f"c{j}_r{l}") if l else cur
            if l:
                b.add(f"c{j}_l{l}_next", cur, NOP, r)
            other = f"f_x{lit}" if lit > 0 else f"t_x{-lit}"
            b.loop(f"l{l}_", r, [(f"c{j}_l{l + 1}_test", ("zero", other)),
                                 (f"c{j}_l{l + 1}_inc", ("inc", c))])
            cur = r
        end = f"c{j}_exit"
        b.add(f"c{j}_check", cur, ("dec", c), end)
        cur = end
    counters = [x for i in range(1, cnf.num_vars + 1) for x in (f"t_x{i}", f"f_x{i}")]
    counters += [f"c{j}" for j in range(1, len(cnf.clauses) + 1)]
    return _finish(b, "s0", cur,
                   lambda b: CounterMachine(b.states, "s0", b.transitions, counters))


def sat_to_cfsm(cnf):
    """CFSM reduction: returns ``(machine, s_f, bounded expression)``.

    Channel ``xh_i`` starts with a ``0`` token that exactly one of the two
    variable loops must swap for a ``1``; that loop writes the guess into
    ``x_i``. Clause loops dequeue and requeue a guess and report to ``c_j``.
    """
    cnf = _as_cnf(cnf)
    b = _Builder()
    cur = b.state("s0")
    for i in range(1, cnf.num_vars + 1):
        x, xh = f"x{i}", f"xh{i}"
        q1, q2, q3 = f"x{i}_a", f"x{i}_b", f"x{i}_end"
        b.add(f"x{i}_token", cur, ("send", xh, "0"), q1)
        for q, v, tag in ((q1, "0", "false"), (q2, "1", "true")):
            b.loop(tag, q, [(f"x{i}_{tag}_guess", ("send", x, v)),
                            (f"x{i}_{tag}_take", ("recv", xh, "0")),
                            (f"x{i}_{tag}_give", ("send", xh, "1"))])
            if q == q1:
                b.add(f"x{i}_next", q1, NOP, q2)
        b.add(f"x{i}_done", q2, ("recv", xh, "1"), q3)
        cur = q3
    for j, clause in enumerate(cnf.clauses, 1):
        c = f"c{j}"
        for l, lit in enumerate(clause):
            r = b.state(f"c{j}_r{l}") if l else cur
            if l:
                b.add(f"c{j}_l{l}_next", cur, NOP, r)
            x, v = f"x{abs(lit)}", "1" if lit > 0 else "0"
            b.loop(f"l{l}_", r, [(f"c{j}_l{l + 1}_get", ("recv", x, v)),
                                 (f"c{j}_l{l + 1}_put", ("send", x, v)),
                                 (f"c{j}_l{l + 1}_ok", ("send", c, "1"))])
            cur = r
        end = f"c{j}_exit"
        b.add(f"c{j}_check", cur, ("recv", c, "1"), end)
        cur = end
    channels = [x for i in range(1, cnf.num_vars + 1) for x in (f"x{i}", f"xh{i}")]
    channels += [f"c{j}" for j in range(1, len(cnf.clauses) + 1)]
    return _finish(b, "s0", cur,
                   lambda b: Cfsm(b.states, "s0", b.transitions, channels, ("0", "1")))


def gadget_witness(cnf, assignment, kind: str = "cm") -> tuple:
    """The transition word that follows ``assignment`` through the gadget chain."""
    cnf = _as_cnf(cnf)
    word = []
    for i, val in enumerate(assignment, 1):
        if kind == "cm":
            word.append(f"x{i}_false")
            if val:
                word += [f"x{i}_inc_t", f"x{i}_dec_f"]
            word.append(f"x{i}_next")
        else:
            word.append(f"x{i}_token")
            if not val:
                word += [f"x{i}_false_guess", f"x{i}_false_take", f"x{i}_false_give"]
            word.append(f"x{i}_next")
            if val:
                word += [f"x{i}_true_guess", f"x{i}_true_take", f"x{i}_true_give"]
            word.append(f"x{i}_done")
    for j, clause in enumerate(cnf.clauses, 1):
        for l, lit in enumerate(clause):
            if l:
                word.append(f"c{j}_l{l}_next")
            if assignment[abs(lit) - 1] == (lit > 0):
                if kind == "cm":
                    word += [f"c{j}_l{l + 1}_test", f"c{j}_l{l + 1}_inc"]
                else:
                    word += [f"c{j}_l{l + 1}_get", f"c{j}_l{l + 1}_put", f"c{j}_l{l + 1}_ok"]
        word.append(f"c{j}_check")
    return tuple(word)
