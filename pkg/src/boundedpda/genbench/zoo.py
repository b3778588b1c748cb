"""Small hand-built machines used by examples, tests and the CLI."""
from __future__ import annotations

from ..mhpda import Tpda
from ..words import ENDMARKER

BOT = "⊥"


def palindrome_machine() -> Tpda:
    """2-head machine for ``{w&w | w in {0,1}* is a palindrome}``.

    Head 2 first checks that the block before ``&`` is a palindrome, then
    heads 1 and 2 compare the two copies of ``w`` letter by letter. The two
    ``up -> down`` moves that read a letter handle palindromes of odd length.
    """
    up, down, s, s1, q, f = "q_up", "q_down", "q_s", "q_s'", "q", "q_f"
    gamma = (BOT, "0", "1")
    trs = []
    for g in gamma:
        trs.append((up, None, g, down, (g,)))
        for x in "01":
            trs.append((up, x, g, up, (x, g)))
            trs.append((up, x, g, down, (g,)))
            trs.append((s, x, g, s1, (x, g)))
            trs.append((f, x, g, f, (g,)))
        trs.append((s, "&", g, q, (g,)))
        trs.append((q, ENDMARKER, g, f, (g,)))
        trs.append((f, ENDMARKER, g, f, (g,)))
    for x in "01":
        trs.append((down, x, x, down, ()))
        trs.append((s1, x, x, s, ()))
    trs.append((down, "&", BOT, s, (BOT,)))
    select = {up: 2, down: 2, s1: 2, q: 2, s: 1, f: 1}
    return Tpda({up, down, s, s1, q, f}, ("0", "1", "&"), gamma, trs, select, up, BOT, {f}, 2)


def _counting_pda(first, second, tail, *, match_second_tail=False, min_one=False) -> Tpda:
    # 1-head machine for first^n second^n tail^* (or first^* second^n tail^n)
    alphabet = ("a", "b", "c")
    gamma = (BOT, "A")
    p0, p1, p2, f = "p0", "p1", "p2", "f"
    trs = []
    if not match_second_tail:
        for g in gamma:
            trs.append((p0, first, g, p0, ("A", g)))
        trs.append((p0, second, "A", p1, ()))
        trs.append((p1, second, "A", p1, ()))
        if not min_one:
            trs.append((p0, None, BOT, p1, (BOT,)))
        trs.append((p1, None, BOT, p2, (BOT,)))
        trs.append((p2, tail, BOT, p2, (BOT,)))
    else:
        for g in gamma:
            trs.append((p0, first, g, p0, (g,)))
            trs.append((p0, second, g, p1, ("A", g)))
            trs.append((p1, second, g, p1, ("A", g)))
        trs.append((p0, None, BOT, p1, (BOT,)))
        trs.append((p1, tail, "A", p2, ()))
        trs.append((p2, tail, "A", p2, ()))
        trs.append((p1, None, BOT, p2, (BOT,)))
    trs.append((p2, ENDMARKER, BOT, f, (BOT,)))
    sel = {p0: 1, p1: 1, p2: 1, f: 1}
    return Tpda({p0, p1, p2, f}, alphabet, gamma, trs, sel, p0, BOT, {f}, 1)


def anbn_cstar() -> Tpda:
    """1-head machine for ``{a^n b^n c^m}``."""
    return _counting_pda("a", "b", "c")


def astar_bncn() -> Tpda:
    """1-head machine for ``{a^m b^n c^n}``."""
    return _counting_pda("a", "b", "c", match_second_tail=True)


def anb2n() -> Tpda:
    """1-head machine over ``{a, b}`` for ``{a^n b^(2n)}``."""
    gamma = (BOT, "A")
    trs = []
    for g in gamma:
        trs.append(("p0", "a", g, "p0", ("A", "A", g)))
    trs += [("p0", None, BOT, "p1", (BOT,)), ("p0", "b", "A", "p1", ()),
            ("p1", "b", "A", "p1", ()), ("p1", ENDMARKER, BOT, "f", (BOT,))]
    return Tpda({"p0", "p1", "f"}, ("a", "b"), gamma, trs, {"p0": 1, "p1": 1, "f": 1},
                "p0", BOT, {"f"}, 1)


def anbn_positive() -> Tpda:
    """1-head machine over ``{a, b}`` for ``{a^n b^n | n >= 1}``."""
    gamma = (BOT, "A")
    trs = []
    for g in gamma:
        trs.append(("p0", "a", g, "p0", ("A", g)))
    trs += [("p0", "b", "A", "p1", ()), ("p1", "b", "A", "p1", ()),
            ("p1", ENDMARKER, BOT, "f", (BOT,))]
    return Tpda({"p0", "p1", "f"}, ("a", "b"), gamma, trs, {"p0": 1, "p1": 1, "f": 1},
                "p0", BOT, {"f"}, 1)


def empty_machine(alphabet=("a",), heads=1) -> Tpda:
    """A machine without final states."""
    sel = {"s": 1}
    return Tpda({"s"}, alphabet, (BOT,), [], sel, "s", BOT, set(), heads)


def universal_machine(alphabet=("a", "b"), heads=1) -> Tpda:
    """Accepts every word: each head in turn reads its tape to the end."""
    states = [f"r{h}" for h in range(1, heads + 1)] + ["f"]
    trs = []
    for h in range(heads):
        for a in alphabet:
            trs.append((states[h], a, BOT, states[h], (BOT,)))
        trs.append((states[h], ENDMARKER, BOT, states[h + 1], (BOT,)))
    sel = {s: min(i + 1, heads) for i, s in enumerate(states)}
    return Tpda(set(states), alphabet, (BOT,), trs, sel, states[0], BOT, {"f"}, heads)
