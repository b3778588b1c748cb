"""Seeded generators shared by the property tests."""
import itertools
import random

from boundedpda.cfg import ContextFreeGrammar, trim
from boundedpda.nfa import Nfa
from boundedpda.pda import Pda


def random_nfa(rng: random.Random, alphabet=("a", "b"), max_states=3) -> Nfa:
    n = rng.randint(1, max_states)
    states = list(range(n))
    trs = set()
    for _ in range(rng.randint(0, 2 * n + 1)):
        label = rng.choice(list(alphabet) + [None])
        trs.add((rng.choice(states), label, rng.choice(states)))
    finals = {s for s in states if rng.random() < 0.5}
    return Nfa(states, alphabet, trs, 0, finals)


def random_pda(rng: random.Random, max_states=4, alphabet=("a", "b"), gamma=("Z", "A")) -> Pda:
    n = rng.randint(1, max_states)
    states = list(range(n))
    trs = set()
    for _ in range(rng.randint(1, 3 * n + 2)):
        push = tuple(rng.choice(gamma) for _ in range(rng.choice((0, 1, 1, 2))))
        read = rng.choice(list(alphabet) + [None])
        trs.add((rng.choice(states), rng.choice(gamma), read, rng.choice(states), push))
    finals = {s for s in states if rng.random() < 0.5} or {rng.choice(states)}
    return Pda(states, alphabet, gamma, 0, gamma[0], finals, trs)


def random_grammar(rng: random.Random, max_prods=6, terminals=("a", "b", "c")):
    """A random grammar, trimmed; may come out with no productions."""
    nts = ["S", "A", "B"][: rng.randint(1, 3)]
    ts = terminals[: rng.randint(1, len(terminals))]
    prods = []
    for _ in range(rng.randint(1, max_prods)):
        rhs = tuple(rng.choice(nts + list(ts)) for _ in range(rng.randint(0, 3)))
        prods.append((rng.choice(nts), rhs))
    return trim(ContextFreeGrammar(tuple(nts), tuple(ts), tuple(prods), "S"))


def derivation_parikh(g: ContextFreeGrammar, bound: int, max_steps=12):
    """Parikh vectors (within the box) of terminal words reached by leftmost
    derivations with at most ``max_steps`` expansions; an independent check
    for the fixpoint computation on small grammars."""
    idx = {t: i for i, t in enumerate(g.terminals)}
    nts = set(g.nonterminals)
    found = set()
    frontier = {((g.start,), (0,) * len(g.terminals))}
    for _ in range(max_steps + 1):
        nxt = set()
        for form, vec in frontier:
            pos = next((i for i, x in enumerate(form) if x in nts), None)
            if pos is None:
                found.add(vec)
                continue
            for lhs, rhs in g.productions:
                if lhs != form[pos]:
                    continue
                v = list(vec)
                rest = []
                for x in rhs:
                    if x in nts:
                        rest.append(x)
                    else:
                        v[idx[x]] += 1
                if max(v, default=0) > bound:
                    continue
                new = form[:pos] + tuple(rest) + form[pos + 1:]
                if len(new) <= bound + 3:
                    nxt.add((new, tuple(v)))
        frontier = nxt
    return found


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def random_storage_machine(rng: random.Random, max_states=6, kind=None):
    """A random counter machine, CFSM or mixed machine with at most two storages.

    Returns ``(machine, s_f)``.
    """
    from boundedpda.frontends.models import StorageMachine, Transition

    kind = kind or rng.choice(["cm", "cfsm", "mixed"])
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    counters, channels = [], []
    if kind == "cm":
        counters = [f"c{i}" for i in range(rng.randint(1, 2))]
    elif kind == "cfsm":
        channels = [f"q{i}" for i in range(rng.randint(1, 2))]
    else:
        counters, channels = ["c0"], ["q0"]
    messages = ("0", "1") if channels else ()
    recursive = kind == "cm" and rng.random() < 0.3
    gamma = ("Z", "A") if recursive else None
    ops = [("nop",)]
    ops += [(o, c) for c in counters for o in ("inc", "dec", "zero")]
    ops += [(o, ch, m) for ch in channels for m in messages for o in ("send", "recv")]
    trs = []
    for j in range(rng.randint(1, 3 * n + 1)):
        pop = push = None
        if recursive and rng.random() < 0.5:
            pop = rng.choice(gamma)
            push = tuple(rng.choice(gamma) for _ in range(rng.choice((0, 1, 2))))
        trs.append(Transition(f"t{j}", rng.choice(states), rng.choice(ops), rng.choice(states),
                              pop, push))
    M = StorageMachine(states, states[0], trs, counters, channels, messages,
                       gamma, "Z" if recursive else None)
    return M, rng.choice(states)
