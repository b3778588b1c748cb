"""Multi-tape / multi-head pushdown automata.

A d-TPDA reads d tapes, each terminated by the endmarker ``$``; the tape
read by a transition is fixed by the selector of its source state. Read as a
d-HPDA (all tapes carry the same word) the machine defines the language
``{w | (w, ..., w) in T(A)}``.

Acceptance: a final state is reached and every head has moved past ``$``.
Stack words are top first.
"""
from __future__ import annotations

import itertools
import warnings
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from .cfg import cfg_analyze
from .errors import AlphabetMismatch, DimensionMismatch, MalformedId, ModelError, UnknownSymbol
from .pda import Pda, pda_to_cfg
from .words import ENDMARKER, as_word

ACCEPTING = "accepting"
REJECTED = "rejected"
BUDGET_EXCEEDED = "budget-exceeded"


class TpdaTransition(NamedTuple):
    src: object
    read: object  # tape letter, ENDMARKER, or None for epsilon
    pop: object
    dst: object
    push: tuple


@dataclass(frozen=True, eq=False)
class Tpda:
    """The 9-tuple machine; ``select`` maps every state to a head in ``1..heads``."""

    states: frozenset
    alphabet: tuple
    stack_alphabet: tuple
    transitions: tuple
    select: dict
    initial: object
    initial_stack: object
    finals: frozenset
    heads: int

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "stack_alphabet", tuple(self.stack_alphabet))
        object.__setattr__(self, "select", dict(self.select))
        trs = tuple(dict.fromkeys(
            TpdaTransition(t[0], t[1], t[2], t[3], tuple(t[4])) for t in self.transitions
        ))
        object.__setattr__(self, "transitions", trs)
        if self.heads < 1:
            raise ModelError("a machine needs at least one head")
        if ENDMARKER in self.alphabet:
            raise ModelError("the endmarker may not be a tape letter")
        if self.initial not in self.states:
            raise ModelError("initial state is not a state")
        if not self.finals <= self.states:
            raise ModelError("final states must be states")
        gamma = set(self.stack_alphabet)
        if self.initial_stack not in gamma:
            raise ModelError("initial stack symbol is not a stack symbol")
        for s in self.states:
            h = self.select.get(s)
            if h is None:
                raise ModelError(f"state {s!r} has no head assignment")
            if not 1 <= h <= self.heads:
                raise ModelError(f"state {s!r} selects head {h}, outside 1..{self.heads}")
        sigma = set(self.alphabet)
        for t in trs:
            if t.src not in self.states or t.dst not in self.states:
                raise ModelError(f"transition {t} uses an undeclared state")
            if t.pop not in gamma or any(x not in gamma for x in t.push):
                raise ModelError(f"transition {t} uses an undeclared stack symbol")
            if t.read is not None and t.read != ENDMARKER and t.read not in sigma:
                raise UnknownSymbol(f"transition {t} reads {t.read!r} outside the alphabet")
        if self.heads > len(self.states):
            warnings.warn(
                f"{self.heads} heads but only {len(self.states)} states: some head is never used",
                stacklevel=2,
            )

    @cached_property
    def by_src(self) -> dict:
        out = defaultdict(list)
        for t in self.transitions:
            out[t.src].append(t)
        return out

    def size(self) -> int:
        """``|S| + |Gamma| + sum over transitions of (4 + |push|)``."""
        return (len(self.states) + len(self.stack_alphabet)
                + sum(4 + len(t.push) for t in self.transitions))

    def with_heads(self, select=None, heads=None) -> "Tpda":
        return Tpda(self.states, self.alphabet, self.stack_alphabet, self.transitions,
                    self.select if select is None else select, self.initial,
                    self.initial_stack, self.finals, self.heads if heads is None else heads)


# The same object serves as an MHPDA; only the language reading differs.
Mhpda = Tpda


def derived_tpda(*args, **kwargs) -> Tpda:
    """Build a machine produced by a construction, where pruning may leave
    fewer states than heads; the user-facing warning is pointless there."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return Tpda(*args, **kwargs)


# --- instantaneous descriptions -----------------------------------------


@dataclass(frozen=True)
class Id:
    """Configuration ``(state, (Lft#Rgt per tape), stack)``.

    Each tape is a pair ``(left, right)`` with ``left + right`` equal to
    ``x$``; a head that is off its tape has ``right == ()``.
    """

    state: object
    tapes: tuple
    stack: tuple

    def __post_init__(self):
        for i, tape in enumerate(self.tapes, 1):
            if len(tape) != 2:
                raise MalformedId(f"tape {i} is not a (left, right) pair")
            left, right = tuple(tape[0]), tuple(tape[1])
            full = left + right
            if not full or full[-1] != ENDMARKER or ENDMARKER in full[:-1]:
                raise MalformedId(f"tape {i} must end with exactly one endmarker")
        object.__setattr__(self, "tapes", tuple((tuple(l), tuple(r)) for l, r in self.tapes))
        object.__setattr__(self, "stack", tuple(self.stack))

    def lft(self, h: int) -> tuple:
        return self.tapes[h - 1][0]

    def rgt(self, h: int) -> tuple:
        return self.tapes[h - 1][1]

    @property
    def positions(self) -> tuple:
        return tuple(len(l) for l, _ in self.tapes)

    def all_off(self) -> bool:
        return all(not r for _, r in self.tapes)

    def render(self) -> str:
        tapes = []
        for left, right in self.tapes:
            tapes.append("".join(map(str, left)) + "#" + "".join(map(str, right)))
        stack = "".join(map(str, self.stack)) or "eps"
        return f"({self.state}, <{', '.join(tapes)}>, {stack})"


def initial_id(A: Tpda, tapes) -> Id:
    tapes = _check_tapes(A, tapes)
    return Id(A.initial, tuple(((), t + (ENDMARKER,)) for t in tapes), (A.initial_stack,))


def _check_tapes(A: Tpda, tapes):
    tapes = [as_word(t) for t in tapes]
    if len(tapes) != A.heads:
        raise DimensionMismatch(f"expected {A.heads} tapes, got {len(tapes)}")
    sigma = set(A.alphabet)
    for t in tapes:
        for a in t:
            if a not in sigma:
                raise AlphabetMismatch(f"tape letter {a!r} not in the machine alphabet")
    return tapes


def step(A: Tpda, c: Id) -> set:
    """The exact one-step successor set of ``c``."""
    if len(c.tapes) != A.heads:
        raise MalformedId(f"ID has {len(c.tapes)} tapes, machine has {A.heads} heads")
    if c.state not in A.states:
        raise MalformedId(f"unknown state {c.state!r}")
    if not c.stack:
        return set()
    top, rest = c.stack[0], c.stack[1:]
    h = A.select[c.state]
    left, right = c.tapes[h - 1]
    out = set()
    for t in A.by_src.get(c.state, ()):
        if t.pop != top:
            continue
        if t.read is None:
            tapes = c.tapes
        elif right and right[0] == t.read:
            tapes = c.tapes[:h - 1] + ((left + right[:1], right[1:]),) + c.tapes[h:]
        else:
            continue
        out.add(Id(t.dst, tapes, t.push + rest))
    return out


# --- exact membership ---------------------------------------------------


def _position_product(A: Tpda, tapes):
    """Input-free PDA over states ``(s, positions)`` pruned to the part that is
    reachable from the start and co-reachable to acceptance, ignoring the stack."""
    padded = [t + (ENDMARKER,) for t in tapes]
    ends = tuple(len(t) for t in padded)

    def moves(s, pos):
        h = A.select[s] - 1
        p = pos[h]
        for t in A.by_src.get(s, ()):
            if t.read is None:
                yield t, pos
            elif p < ends[h] and padded[h][p] == t.read:
                yield t, pos[:h] + (p + 1,) + pos[h + 1:]

    start = (A.initial, (0,) * A.heads)
    seen = {start}
    edges = []
    todo = [start]
    while todo:
        s, pos = todo.pop()
        for t, pos2 in moves(s, pos):
            dst = (t.dst, pos2)
            edges.append(((s, pos), t, dst))
            if dst not in seen:
                seen.add(dst)
                todo.append(dst)
    goals = {(f, ends) for f in A.finals} & seen
    back = defaultdict(list)
    for src, _, dst in edges:
        back[dst].append(src)
    live = set(goals)
    todo = list(goals)
    while todo:
        x = todo.pop()
        for y in back.get(x, ()):
            if y not in live:
                live.add(y)
                todo.append(y)
    if start not in live:
        return None
    trs = [(src, t.pop, None, dst, t.push) for src, t, dst in edges if src in live and dst in live]
    return Pda(live, (), A.stack_alphabet, start, A.initial_stack, goals, trs)


def accepts_tuple_exact(A: Tpda, tapes) -> bool:
    """Exact test of ``tapes in T(A)`` via the position-grid product PDA."""
    tapes = _check_tapes(A, tapes)
    P = _position_product(A, tapes)
    if P is None:
        return False
    return not cfg_analyze(pda_to_cfg(P)).empty


def accepts_shared(M: Mhpda, word) -> bool:
    """``word in L(M)``: every head reads the same word."""
    word = as_word(word)
    return accepts_tuple_exact(M, [word] * M.heads)


def language(M: Mhpda, max_len: int) -> set:
    """All words of length at most ``max_len`` in ``L(M)`` (brute force)."""
    return {w for n in range(max_len + 1)
            for w in itertools.product(M.alphabet, repeat=n) if accepts_shared(M, w)}


# --- budgeted simulation ------------------------------------------------


@dataclass
class SimulationResult:
    kind: str
    explored: int
    trace: list | None = None

    @property
    def run_length(self):
        return None if self.trace is None else len(self.trace) - 1


def simulate_budgeted(A: Tpda, tapes, budget: int) -> SimulationResult:
    """Breadth-first exploration of the step relation over at most ``budget`` IDs."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    c0 = initial_id(A, tapes)
    parent = {c0: None}
    queue = deque([c0])
    explored = 0
    while queue:
        if explored >= budget:
            return SimulationResult(BUDGET_EXCEEDED, explored)
        c = queue.popleft()
        explored += 1
        if c.state in A.finals and c.all_off():
            trace = []
            while c is not None:
                trace.append(c)
                c = parent[c]
            return SimulationResult(ACCEPTING, explored, trace[::-1])
        for c2 in sorted(step(A, c), key=repr):
            if c2 not in parent:
                parent[c2] = c
                queue.append(c2)
    return SimulationResult(REJECTED, explored)


def replay(A: Tpda, trace) -> bool:
    """Check that consecutive IDs of ``trace`` are related by ``step``."""
    return all(b in step(A, a) for a, b in zip(trace, trace[1:]))


# --- Boolean closure ----------------------------------------------------


def _tagged(A: Tpda, tag, shift):
    trs = [((tag, t.src), t.read, (tag, t.pop), (tag, t.dst), tuple((tag, x) for x in t.push))
           for t in A.transitions]
    select = {(tag, s): h + shift for s, h in A.select.items()}
    states = {(tag, s) for s in A.states}
    stack = [(tag, x) for x in A.stack_alphabet]
    return states, stack, trs, select


def _same_alphabet(A1, A2):
    if set(A1.alphabet) != set(A2.alphabet):
        raise AlphabetMismatch("machines must share the tape alphabet")


_BOTTOM = "#bot"


def union(A1: Mhpda, A2: Mhpda) -> Mhpda:
    """``(k1+k2)``-head machine for ``L(A1) | L(A2)``.

    A fresh start state guesses a branch. After the chosen branch reaches one
    of its final states, a drain chain moves the heads of the other branch
    past their endmarkers.
    """
    _same_alphabet(A1, A2)
    k1, k2 = A1.heads, A2.heads
    s1, g1, t1, sel1 = _tagged(A1, 1, 0)
    s2, g2, t2, sel2 = _tagged(A2, 2, k1)
    gamma = [_BOTTOM] + g1 + g2
    start = ("#start",)
    states = {start} | s1 | s2
    select = {start: 1, **sel1, **sel2}
    trs = t1 + t2
    trs.append((start, None, _BOTTOM, (1, A1.initial), ((1, A1.initial_stack), _BOTTOM)))
    trs.append((start, None, _BOTTOM, (2, A2.initial), ((2, A2.initial_stack), _BOTTOM)))
    finals = set()
    for tag, A, other in ((1, A1, range(k1 + 1, k1 + k2 + 1)), (2, A2, range(1, k1 + 1))):
        chain = [("#drain", tag, h) for h in other]
        done = ("#acc", tag)
        states |= set(chain) | {done}
        select[done] = 1
        finals.add(done)
        for h, q in zip(other, chain):
            select[q] = h
        nodes = chain + [done]
        for g in gamma:
            for f in A.finals:
                trs.append(((tag, f), None, g, nodes[0], (g,)))
            for j, q in enumerate(chain):
                for a in A.alphabet:
                    trs.append((q, a, g, q, (g,)))
                trs.append((q, ENDMARKER, g, nodes[j + 1], (g,)))
    return Tpda(states, A1.alphabet, gamma, trs, select, start, _BOTTOM, finals, k1 + k2)


def intersection(A1: Mhpda, A2: Mhpda) -> Mhpda:
    """``(k1+k2)``-head machine for ``L(A1) & L(A2)``.

    ``A1`` runs on heads ``1..k1``; from each of its final states an epsilon
    move pushes the initial stack symbol of ``A2`` and starts ``A2`` on heads
    ``k1+1..k1+k2``.
    """
    _same_alphabet(A1, A2)
    k1, k2 = A1.heads, A2.heads
    s1, g1, t1, sel1 = _tagged(A1, 1, 0)
    s2, g2, t2, sel2 = _tagged(A2, 2, k1)
    gamma = [_BOTTOM] + g1 + g2
    start = ("#start",)
    states = {start} | s1 | s2
    select = {start: 1, **sel1, **sel2}
    trs = t1 + t2
    trs.append((start, None, _BOTTOM, (1, A1.initial), ((1, A1.initial_stack), _BOTTOM)))
    for f in A1.finals:
        for g in [_BOTTOM] + g1:
            trs.append(((1, f), None, g, (2, A2.initial), ((2, A2.initial_stack), g)))
    finals = {(2, f) for f in A2.finals}
    return Tpda(states, A1.alphabet, gamma, trs, select, start, _BOTTOM, finals, k1 + k2)
