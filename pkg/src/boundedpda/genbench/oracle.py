"""Exhaustive box oracle.

Deliberately independent of the formula route: it only uses the machine
semantics (exact membership through the position product) and words.
"""
from __future__ import annotations

from ..mhpda import accepts_shared
from ..verdicts import EmptinessVerdict
from ..words import expand, sum_lex_order


def brute_force_emptiness(M, bexpr, K: int) -> EmptinessVerdict:
    """First ``k`` in ``[0, K]^n`` (sum, then lexicographic) whose word is accepted."""
    if K < 0:
        raise ValueError("K must be >= 0")
    tried = 0
    for k in sum_lex_order(bexpr.n, K):
        tried += 1
        word = expand(bexpr, k)
        if accepts_shared(M, word):
            return EmptinessVerdict.non_empty(k, word, True, engine="oracle", tried=tried)
    return EmptinessVerdict.empty_within(K, engine="oracle", tried=tried)


def box_truth_table(M, bexpr, K: int) -> dict:
    """``k -> accepts_shared(M, expand(bexpr, k))`` on the whole box."""
    return {k: accepts_shared(M, expand(bexpr, k)) for k in sum_lex_order(bexpr.n, K)}
