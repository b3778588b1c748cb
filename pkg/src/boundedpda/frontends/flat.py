"""Bounded expressions covering every run of a machine with a flat control graph."""
from __future__ import annotations

from collections import defaultdict

from ..errors import NoSegments, NotFlat
from ..words import BoundedExpression
from .models import StorageMachine


def _sccs(nodes, succ):
    """Tarjan's algorithm; components come out in reverse topological order."""
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = [0]

    def visit(v):
        # iterative to stay clear of the recursion limit on long gadget chains
        work = [(v, iter(succ[v]))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        while work:
            u, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ[w])))
                    break
                if w in on:
                    low[u] = min(low[u], index[w])
            else:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[u])
                if low[u] == index[u]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on.discard(w)
                        comp.append(w)
                        if w == u:
                            break
                    out.append(comp)

    for v in nodes:
        if v not in index:
            visit(v)
    return out


def flat_bounded_expression(M: StorageMachine, target=None) -> BoundedExpression:
    """One bounded expression containing every transition word of ``M`` that
    ends at ``target`` or at a state where its component is entered or left.

    Components of the control graph are visited in topological order. A
    cyclic component contributes, for each entry state, its cycle word rotated
    to start there, then one-letter segments for the cycle edges leading on
    to any exit (or ``target``); every bridge leaving the component becomes a
    one-letter segment. Raises :class:`NotFlat` when a component is not a
    single simple cycle.
    """
    order = {s: i for i, s in enumerate(M.states)}
    succ = defaultdict(list)
    out_edges = defaultdict(list)
    for t in M.transitions:
        succ[t.src].append(t.dst)
        out_edges[t.src].append(t)
    reach, todo = {M.initial}, [M.initial]
    while todo:
        s = todo.pop()
        for d in succ[s]:
            if d not in reach:
                reach.add(d)
                todo.append(d)
    nodes = [s for s in M.states if s in reach]
    comps = list(reversed(_sccs(nodes, succ)))
    comp_of = {s: i for i, c in enumerate(comps) for s in c}

    segments = []
    for ci, comp in enumerate(comps):
        members = set(comp)
        inner = [t for s in comp for t in out_edges[s] if t.dst in members]
        if inner:
            nxt = {}
            for t in inner:
                if t.src in nxt:
                    raise NotFlat(f"state {t.src!r} lies on more than one cycle")
                nxt[t.src] = t
            if len(inner) != len(comp):
                raise NotFlat(f"component {sorted(map(repr, comp))} is not a simple cycle")
            entries = {t.dst for t in M.transitions
                       if t.dst in members and t.src in comp_of and comp_of[t.src] != ci}
            if M.initial in members:
                entries.add(M.initial)
            exits = {t.src for s in comp for t in out_edges[s] if t.dst not in members}
            if target in members:
                exits.add(target)
            for e in sorted(entries, key=order.get):
                cycle, s = [], e
                while True:
                    cycle.append(nxt[s])
                    s = nxt[s].dst
                    if s == e:
                        break
                segments.append(tuple(t.name for t in cycle))
                # partial walk from e to the furthest exit along the cycle
                last = max((i for i, t in enumerate(cycle) if t.dst in exits and t.dst != e),
                           default=-1)
                segments.extend((t.name,) for t in cycle[:last + 1])
        bridges = [t for s in sorted(comp, key=order.get) for t in out_edges[s]
                   if t.dst not in members]
        bridges.sort(key=lambda t: (comp_of[t.dst], order[t.src]))
        segments.extend((t.name,) for t in bridges)
    if not segments:
        raise NoSegments("no transition is reachable, so there is nothing to bound")
    return BoundedExpression(tuple(segments))
