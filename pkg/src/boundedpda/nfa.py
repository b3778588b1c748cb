"""Nondeterministic finite automata with epsilon transitions."""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property

from .errors import ModelError
from .words import as_word

# Transitions are triples (src, label, dst); label None is epsilon.


@dataclass(frozen=True, eq=False)
class Nfa:
    states: frozenset
    alphabet: tuple
    transitions: frozenset
    initial: object
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        alpha = set(self.alphabet)
        if self.initial not in self.states:
            raise ModelError("initial state is not a state")
        if not self.finals <= self.states:
            raise ModelError("final states must be states")
        for src, label, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ModelError(f"transition {src!r} -> {dst!r} uses an undeclared state")
            if label is not None and label not in alpha:
                raise ModelError(f"transition label {label!r} not in alphabet")

    @cached_property
    def _out(self):
        out = defaultdict(list)
        for src, label, dst in self.transitions:
            out[src].append((label, dst))
        return out

    def eps_closure(self, states) -> frozenset:
        seen = set(states)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for label, dst in self._out.get(q, ()):
                if label is None and dst not in seen:
                    seen.add(dst)
                    todo.append(dst)
        return frozenset(seen)

    def step(self, states, letter) -> frozenset:
        nxt = {dst for q in states for label, dst in self._out.get(q, ()) if label == letter}
        return self.eps_closure(nxt)

    def accepts(self, word) -> bool:
        current = self.eps_closure({self.initial})
        for letter in as_word(word):
            current = self.step(current, letter)
            if not current:
                return False
        return bool(current & self.finals)

    def words(self, max_len: int) -> set:
        """All accepted words of length at most ``max_len``."""
        found = set()
        layer = {(): self.eps_closure({self.initial})}
        for _ in range(max_len + 1):
            nxt = {}
            for w, states in layer.items():
                if states & self.finals:
                    found.add(w)
            if _ == max_len:
                break
            for w, states in layer.items():
                for a in self.alphabet:
                    s2 = self.step(states, a)
                    if s2:
                        nxt[w + (a,)] = s2
            layer = nxt
        return found

    def size(self) -> int:
        return len(self.states) + len(self.alphabet) + len(self.transitions)


def indexed_shuffle_nfa(automata) -> Nfa:
    """NFA for the indexed shuffle of the languages of ``automata``.

    Letters of the i-th automaton (1-based) become pairs ``(letter, i)``; the
    state space is the product of the input state spaces and every transition
    advances exactly one component.
    """
    automata = list(automata)
    if not automata:
        raise ModelError("need at least one automaton")
    alphabet = tuple((a, i) for i, m in enumerate(automata, 1) for a in m.alphabet)
    states = frozenset(itertools.product(*(sorted(m.states, key=repr) for m in automata)))
    transitions = set()
    for tup in states:
        for i, m in enumerate(automata):
            for label, dst in m._out.get(tup[i], ()):
                new = tup[:i] + (dst,) + tup[i + 1:]
                transitions.add((tup, None if label is None else (label, i + 1), new))
    initial = tuple(m.initial for m in automata)
    finals = frozenset(t for t in states if all(q in m.finals for q, m in zip(t, automata)))
    return Nfa(states, alphabet, frozenset(transitions), initial, finals)


def interleavings(words) -> set:
    """Brute-force indexed shuffle of single words: every interleaving of the
    words, with letters of the i-th word tagged ``(letter, i)``."""
    tagged = [tuple((a, i) for a in as_word(w)) for i, w in enumerate(words, 1)]
    out = set()

    def rec(prefix, rests):
        if all(not r for r in rests):
            out.add(prefix)
            return
        for j, r in enumerate(rests):
            if r:
                rec(prefix + (r[0],), rests[:j] + (r[1:],) + rests[j + 1:])

    rec((), tuple(tagged))
    return out


def reachable_states(nfa: Nfa) -> frozenset:
    seen = {nfa.initial}
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        for _, dst in nfa._out.get(q, ()):
            if dst not in seen:
                seen.add(dst)
                todo.append(dst)
    return frozenset(seen)
