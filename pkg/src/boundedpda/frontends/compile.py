"""Compilation of storage machines into families of HPDAs over transition names.

A transition word ``pi`` drives ``M`` to ``s_f`` iff every member of the
family accepts ``pi``: ``P_0`` follows the control flow (and the recursion
stack), and one checker per counter or channel validates its storage.
"""
from __future__ import annotations

from ..mhpda import Tpda, accepts_shared
from ..pipeline import DecideConfig, decide_family
from ..verdicts import EmptinessVerdict
from ..words import ENDMARKER, BoundedExpression, parse_bounded_expression
from .models import StorageMachine, reaches

BOT = "⊥"
A = "a"
ACCEPT = "#acc"
BASE, START = "#base", "#start"


def control_automaton(M: StorageMachine, s_f) -> Tpda:
    """``P_0``: accepts the words whose control flow (with the stack) ends at ``s_f``.

    A recursive machine may pop its bottom symbol; the run then goes on with
    an empty stack. ``P_0`` keeps a hidden base symbol under the bottom so
    that stack-agnostic steps remain possible there.
    """
    M.check_target(s_f)
    gamma = tuple(M.stack_alphabet) + (BASE,) if M.recursive else (BOT,)
    trs = []
    for t in M.transitions:
        if t.pop is None:
            for g in gamma:
                trs.append((t.src, t.name, g, t.dst, tuple(t.push or ()) + (g,)))
        else:
            trs.append((t.src, t.name, t.pop, t.dst, tuple(t.push or ())))
    for g in gamma:
        trs.append((s_f, ENDMARKER, g, ACCEPT, (g,)))
    states = set(M.states) | {ACCEPT}
    if not M.recursive:
        return Tpda(states, M.alphabet, gamma, trs, {s: 1 for s in states},
                    M.initial, BOT, {ACCEPT}, 1)
    trs.append((START, None, BASE, M.initial, (M.bottom, BASE)))
    states.add(START)
    return Tpda(states, M.alphabet, gamma, trs, {s: 1 for s in states},
                START, BASE, {ACCEPT}, 1)


def counter_checker(M: StorageMachine, counter) -> Tpda:
    """The unary-counter template: ``a`` on the stack per unit of ``counter``."""
    q, qf = "q", "q_f"
    trs = []
    for t in M.transitions:
        mine = t.op[0] in ("inc", "dec", "zero") and t.op[1] == counter
        if not mine:
            trs += [(q, t.name, g, q, (g,)) for g in (BOT, A)]
        elif t.op[0] == "inc":
            trs += [(q, t.name, g, q, (A, g)) for g in (BOT, A)]
        elif t.op[0] == "dec":
            trs.append((q, t.name, A, q, ()))
        else:
            trs.append((q, t.name, BOT, q, (BOT,)))
    trs += [(q, ENDMARKER, g, qf, (g,)) for g in (BOT, A)]
    return Tpda({q, qf}, M.alphabet, (BOT, A), trs, {q: 1, qf: 1}, q, BOT, {qf}, 1)


def channel_checker(M: StorageMachine, channel) -> Tpda:
    """The two-head FIFO template for ``channel``.

    Head 2 (``H``) runs ahead over the word; each receive it meets sends the
    lagging head 1 (``h``) forward to the matching send. The stack holds one
    ``a`` per channel operation between the two heads.
    """
    qH, qf = "q_H", "q_f"
    qh = {m: ("q_h", m) for m in M.messages}
    trs = []
    gs = (BOT, A)
    for t in M.transitions:
        mine = t.op[0] in ("send", "recv") and t.op[1] == channel
        if not mine:
            for s in (qH, qf, *qh.values()):
                trs += [(s, t.name, g, s, (g,)) for g in gs]
            continue
        trs += [(qf, t.name, g, qf, (g,)) for g in gs]
        m = t.op[2]
        if t.op[0] == "send":
            trs += [(qH, t.name, g, qH, (A, g)) for g in gs]
            for m2, s in qh.items():
                if m2 == m:
                    trs.append((s, t.name, A, qH, ()))
        else:
            trs += [(qH, t.name, g, qh[m], (A, g)) for g in gs]
            for s in qh.values():
                trs.append((s, t.name, A, s, ()))
    trs += [(qH, ENDMARKER, g, qf, (g,)) for g in gs]
    trs += [(qf, ENDMARKER, g, qf, (g,)) for g in gs]
    states = {qH, qf, *qh.values()}
    select = {s: 1 for s in states}
    select[qH] = 2
    return Tpda(states, M.alphabet, gs, trs, select, qH, BOT, {qf}, 2)


def compile_family(M: StorageMachine, s_f) -> list:
    """``[P_0, P_1, ..., P_k]``: control automaton, then counters, then channels."""
    family = [control_automaton(M, s_f)]
    family += [counter_checker(M, c) for c in M.counters]
    family += [channel_checker(M, ch) for ch in M.channels]
    return family


cm_compile = compile_family
cfsm_compile = compile_family
mixed_compile = compile_family


def family_accepts(family, word) -> bool:
    return all(accepts_shared(P, word) for P in family)


def _as_bexpr(M, bexpr):
    if isinstance(bexpr, BoundedExpression):
        return bexpr
    return parse_bounded_expression(bexpr, M.alphabet)


def bounded_reach(M: StorageMachine, s_f, bexpr, K: int = 3,
                  config: DecideConfig | None = None) -> EmptinessVerdict:
    """Is ``s_f`` reachable by a transition word in ``L(bexpr)`` with exponents in ``[0, K]``?

    Witnesses are replayed on the interpreter; the run must end at ``s_f``.
    """
    M.check_target(s_f)
    bexpr = _as_bexpr(M, bexpr)
    if config is None:
        config = DecideConfig(K=K)
    family = compile_family(M, s_f)
    verdict = decide_family(family, bexpr, config, verify=lambda w: reaches(M, w, s_f))
    verdict.stats["storage"] = len(family) - 1
    return verdict


cm_bounded_reach = bounded_reach
cfsm_bounded_reach = bounded_reach
mixed_bounded_reach = bounded_reach
