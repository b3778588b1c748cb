"""One-way pushdown automata, an exact membership test and the PDA to CFG conversion.

Stack words are written top first: a transition ``(p, X, a, q, (Y, Z))``
pops ``X``, reads ``a`` (``None`` for epsilon) and leaves ``Y`` on top of ``Z``.
A PDA accepts when it reaches a final state with the input consumed; the
stack content is unconstrained.
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from .cfg import ContextFreeGrammar, trim
from .errors import ModelError, UnknownSymbol
from .words import as_word


class PdaTransition(NamedTuple):
    src: object
    pop: object
    read: object  # None is epsilon
    dst: object
    push: tuple


@dataclass(frozen=True, eq=False)
class Pda:
    states: frozenset
    input_alphabet: tuple
    stack_alphabet: tuple
    initial: object
    initial_stack: object
    finals: frozenset
    transitions: tuple

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "stack_alphabet", tuple(self.stack_alphabet))
        trs = tuple(dict.fromkeys(
            PdaTransition(t[0], t[1], t[2], t[3], tuple(t[4])) for t in self.transitions
        ))
        object.__setattr__(self, "transitions", trs)
        if self.initial not in self.states:
            raise ModelError("initial state is not a state")
        if not self.finals <= self.states:
            raise ModelError("final states must be states")
        gamma = set(self.stack_alphabet)
        sigma = set(self.input_alphabet)
        if self.initial_stack not in gamma:
            raise ModelError("initial stack symbol is not a stack symbol")
        for t in trs:
            if t.src not in self.states or t.dst not in self.states:
                raise ModelError(f"transition {t} uses an undeclared state")
            if t.pop not in gamma or any(x not in gamma for x in t.push):
                raise ModelError(f"transition {t} uses an undeclared stack symbol")
            if t.read is not None and t.read not in sigma:
                raise UnknownSymbol(f"transition {t} reads {t.read!r} outside the alphabet")

    @cached_property
    def by_top(self) -> dict:
        out = defaultdict(list)
        for t in self.transitions:
            out[t.src, t.pop].append(t)
        return out

    def size(self) -> int:
        """``|S| + |Gamma| + sum over transitions of (4 + |push|)``."""
        return (len(self.states) + len(self.stack_alphabet)
                + sum(4 + len(t.push) for t in self.transitions))


# --- exact membership via post* saturation --------------------------------

_EPS = object()


def _post_star(rules, p0, g0):
    """Saturated P-automaton transitions for ``post*({(p0, g0)})``."""
    sf = ("#sf",)
    by_top = defaultdict(list)
    for p, g, q, w in rules:
        by_top[p, g].append((q, w))
    rel = set()
    out = defaultdict(set)  # state -> {(label, dst)}
    eps_into = defaultdict(set)  # mid -> {p with (p, eps, mid)}
    work = deque([(p0, g0, sf)])
    while work:
        t = work.popleft()
        if t in rel:
            continue
        rel.add(t)
        p, g, q = t
        out[p].add((g, q))
        if g is _EPS:
            eps_into[q].add(p)
            for g2, q2 in list(out[q]):
                if g2 is not _EPS:
                    work.append((p, g2, q2))
            continue
        for p2, w in by_top.get((p, g), ()):
            if not w:
                work.append((p2, _EPS, q))
            elif len(w) == 1:
                work.append((p2, w[0], q))
            else:
                mid = ("#mid", p2, w[0])
                work.append((p2, w[0], mid))
                t2 = (mid, w[1], q)
                if t2 not in rel:
                    rel.add(t2)
                    out[mid].add((w[1], q))
                    for p3 in list(eps_into[mid]):
                        work.append((p3, w[1], q))
    return out, sf


def pda_accepts(pda: Pda, word) -> bool:
    """Exact membership test, independent of the grammar route.

    The control states are paired with input positions and the resulting
    pushdown system is saturated with the post* construction; the word is
    accepted iff some configuration ``((f, |word|), stack)`` with ``f`` final
    is reachable.
    """
    word = as_word(word)
    for a in word:
        if a not in pda.input_alphabet:
            raise UnknownSymbol(f"letter {a!r} not in the input alphabet")
    n = len(word)
    rules = []
    for t in pda.transitions:
        for i in range(n + 1):
            if t.read is None:
                rules.append(((t.src, i), t.pop, (t.dst, i), t.push))
            elif i < n and word[i] == t.read:
                rules.append(((t.src, i), t.pop, (t.dst, i + 1), t.push))
    rules = _split_long_pushes(rules)
    out, sf = _post_star(rules, (pda.initial, 0), pda.initial_stack)
    targets = {(f, n) for f in pda.finals}
    return any(out.get(t) for t in targets) or False


def _split_long_pushes(rules):
    fresh = itertools.count()
    res = []
    for p, g, q, w in rules:
        if len(w) <= 2:
            res.append((p, g, q, w))
            continue
        # (p, g) -> (q, w1 ... wk): first replace g by wk, then push the
        # remaining symbols two at a time through private control states
        k = len(w)
        cur = ("#n", next(fresh))
        res.append((p, g, cur, (w[-1],)))
        for j in range(k - 2, 0, -1):
            nxt = ("#n", next(fresh))
            res.append((cur, w[j + 1], nxt, (w[j], w[j + 1])))
            cur = nxt
        res.append((cur, w[1], q, (w[0], w[1])))
    return res


def pda_words(pda: Pda, max_len: int) -> set:
    """All accepted words of length at most ``max_len`` (brute force)."""
    found = set()
    for n in range(max_len + 1):
        for w in itertools.product(pda.input_alphabet, repeat=n):
            if pda_accepts(pda, w):
                found.add(w)
    return found


# --- PDA to CFG -----------------------------------------------------------


def pda_summaries(pda: Pda) -> set:
    """All triples ``(p, X, q)`` such that ``p`` with ``X`` on top can pop ``X``
    and land in ``q`` without touching the stack below."""
    summaries = set()
    succ = defaultdict(set)  # (p, X) -> {q}
    waiting = defaultdict(list)  # (p, X) -> [(t, j)] items blocked on that summary
    work = deque()
    items = set()

    def advance(t, j, s):
        # item: first j pushed symbols of t are popped and control is at s
        if (t, j, s) in items:
            return
        items.add((t, j, s))
        if j == len(t.push):
            work.append((t.src, t.pop, s))
            return
        key = (s, t.push[j])
        waiting[key].append((t, j))
        for s2 in list(succ.get(key, ())):
            advance(t, j + 1, s2)

    for t in pda.transitions:
        advance(t, 0, t.dst)
    while work:
        trip = work.popleft()
        if trip in summaries:
            continue
        summaries.add(trip)
        p, x, q = trip
        succ[p, x].add(q)
        for t, j in list(waiting.get((p, x), ())):
            advance(t, j + 1, q)
    return summaries


def pda_to_cfg(pda: Pda) -> ContextFreeGrammar:
    """Triple construction restricted to feasible triples, then trimmed.

    Nonterminal ``("pop", p, X, q)`` derives the words read while going from
    ``p`` with ``X`` on top to ``q`` with ``X`` popped; ``("run", p, X)``
    derives the words leading from the configuration ``(p, X)`` to a final
    state. The start symbol is ``("run", initial, initial_stack)``.
    """
    summaries = pda_summaries(pda)
    succ = defaultdict(set)
    for p, x, q in summaries:
        succ[p, x].add(q)

    def chains(start, symbols, end=None):
        # state sequences threading the summaries for ``symbols``
        if not symbols:
            if end is None or start == end:
                yield ()
            return
        for s in sorted(succ.get((start, symbols[0]), ()), key=repr):
            for rest in chains(s, symbols[1:], end):
                yield ((start, symbols[0], s),) + rest

    def body(t, path):
        rhs = [] if t.read is None else [t.read]
        rhs.extend(("pop",) + trip for trip in path)
        return rhs

    start = ("run", pda.initial, pda.initial_stack)
    prods = []
    seen = {start}
    todo = [start]
    while todo:
        nt = todo.pop()
        new_rhs = []
        if nt[0] == "pop":
            _, p, x, q = nt
            for t in pda.by_top.get((p, x), ()):
                for path in chains(t.dst, t.push, q):
                    new_rhs.append((body(t, path), [("pop",) + s for s in path]))
        else:
            _, p, x = nt
            if p in pda.finals:
                new_rhs.append(([], []))
            for q in sorted(succ.get((p, x), ()), key=repr):
                if q in pda.finals:
                    new_rhs.append(([("pop", p, x, q)], [("pop", p, x, q)]))
            for t in pda.by_top.get((p, x), ()):
                for j in range(len(t.push)):
                    for path in chains(t.dst, t.push[:j]):
                        r = path[-1][2] if path else t.dst
                        run = ("run", r, t.push[j])
                        new_rhs.append((body(t, path) + [run], [("pop",) + s for s in path] + [run]))
        for rhs, used in new_rhs:
            prods.append((nt, tuple(rhs)))
            for y in used:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    nts = [start] + sorted((n for n in seen if n != start), key=repr)
    g = ContextFreeGrammar(tuple(nts), pda.input_alphabet, tuple(prods), start)
    return trim(g)
