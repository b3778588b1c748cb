"""Seeded random machines and bounded expressions."""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..mhpda import Tpda
from ..words import ENDMARKER, BoundedExpression


@dataclass(frozen=True)
class Limits:
    """Upper bounds for a random draw."""

    states: int = 3
    heads: int = 2
    segments: int = 2
    segment_length: int = 1
    alphabet: tuple = ("a", "b")
    stack: tuple = ("Z", "A")
    density: float = 2.5  # expected transitions per state
    skeleton: float = 0.5  # chance of planting a path that hands the heads over in turn

    @classmethod
    def of(cls, value) -> "Limits":
        if isinstance(value, Limits):
            return value
        if value is None:
            return cls()
        return cls(*value)


def random_machine(rng: random.Random, limits: Limits, heads=None) -> Tpda:
    # a forced head count needs one state per head
    low = heads or 1
    n_states = rng.randint(low, max(low, limits.states))
    d = heads if heads is not None else rng.randint(1, min(limits.heads, n_states))
    states = [f"s{i}" for i in range(n_states)]
    select = {s: rng.randint(1, d) for s in states}
    # every head gets at least one state so it can read its endmarker
    owners = rng.sample(states, d)
    for h, s in zip(range(1, d + 1), owners):
        select[s] = h
    sigma, gamma = limits.alphabet, limits.stack
    reads = list(sigma) + [ENDMARKER, None]
    trs = set()
    n_trs = max(1, round(limits.density * n_states + rng.uniform(-0.5, 0.5)))
    for _ in range(n_trs):
        src, dst = rng.choice(states), rng.choice(states)
        pop = rng.choice(gamma)
        read = rng.choice(reads)
        push = tuple(rng.choice(gamma) for _ in range(rng.choice((0, 1, 1, 2))))
        trs.add((src, read, pop, dst, push))
    # an endmarker step per head keeps acceptance reachable more often
    for s in states:
        if rng.random() < 0.7:
            trs.add((s, ENDMARKER, rng.choice(gamma), rng.choice(states), (rng.choice(gamma),)))
    finals = {s for s in states if rng.random() < 0.4} or {rng.choice(states)}
    if d > 1 and rng.random() < limits.skeleton:
        # heads take turns: each owner skims some letters, reads $ and passes on
        first = select[states[0]]
        order = [states[0]] + [owners[h - 1] for h in range(1, d + 1) if h != first]
        for i, s in enumerate(order):
            keep = [a for a in sigma if rng.random() < 0.6]
            nxt = order[i + 1] if i + 1 < len(order) else rng.choice(sorted(finals))
            for g in gamma:
                trs.update((s, a, g, s, (g,)) for a in keep)
                trs.add((s, ENDMARKER, g, nxt, (g,)))
    return Tpda(states, sigma, gamma, sorted(trs, key=repr), select, states[0], gamma[0], finals, d)


def random_bexpr(rng: random.Random, limits: Limits) -> BoundedExpression:
    n = rng.randint(1, limits.segments)
    segs = []
    for _ in range(n):
        length = rng.randint(1, limits.segment_length)
        segs.append(tuple(rng.choice(limits.alphabet) for _ in range(length)))
    return BoundedExpression(tuple(segs))


def random_instance(seed: int, limits=None):
    """Deterministic ``(machine, bounded expression)`` for ``seed``.

    ``limits`` is a :class:`Limits` or a tuple ``(states, heads, segments,
    segment length)``.
    """
    limits = Limits.of(limits)
    rng = random.Random(seed)
    M = random_machine(rng, limits)
    return M, random_bexpr(rng, limits)
