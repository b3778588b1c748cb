"""Context-free grammars: trimming, CYK membership and bounded Parikh images."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property

from .errors import ModelError, ParseError
from .words import EPS_TOKEN, as_word


@dataclass(frozen=True, eq=False)
class ContextFreeGrammar:
    """Grammar with ordered nonterminals, terminals and productions.

    ``productions`` is a tuple of ``(lhs, rhs)`` pairs where ``rhs`` is a tuple
    over terminals and nonterminals. Terminal order fixes the Parikh order.
    """

    nonterminals: tuple
    terminals: tuple
    productions: tuple
    start: object

    def __post_init__(self):
        nts = tuple(dict.fromkeys(self.nonterminals))
        ts = tuple(dict.fromkeys(self.terminals))
        prods = tuple(dict.fromkeys((lhs, tuple(rhs)) for lhs, rhs in self.productions))
        object.__setattr__(self, "nonterminals", nts)
        object.__setattr__(self, "terminals", ts)
        object.__setattr__(self, "productions", prods)
        ntset, tset = set(nts), set(ts)
        if ntset & tset:
            raise ModelError("terminals and nonterminals overlap")
        if self.start not in ntset:
            raise ModelError(f"start symbol {self.start!r} is not a nonterminal")
        for lhs, rhs in prods:
            if lhs not in ntset:
                raise ModelError(f"production for undeclared nonterminal {lhs!r}")
            for x in rhs:
                if x not in ntset and x not in tset:
                    raise ModelError(f"undeclared symbol {x!r} in production of {lhs!r}")

    @cached_property
    def nonterminal_set(self) -> frozenset:
        return frozenset(self.nonterminals)

    @cached_property
    def by_lhs(self) -> dict:
        out = defaultdict(list)
        for lhs, rhs in self.productions:
            out[lhs].append(rhs)
        return out

    def size(self) -> int:
        """Sum over productions of ``1 + |rhs|``."""
        return sum(1 + len(rhs) for _, rhs in self.productions)

    def to_text(self) -> str:
        lines = []
        order = [self.start] + [n for n in self.nonterminals if n != self.start]
        for nt in order:
            alts = self.by_lhs.get(nt)
            if not alts:
                continue
            rendered = [" ".join(_sym(x) for x in rhs) if rhs else EPS_TOKEN for rhs in alts]
            lines.append(f"{_sym(nt)} -> " + " | ".join(rendered))
        return "\n".join(lines) + ("\n" if lines else "")


def _sym(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "<" + ",".join(_sym(y) for y in x) + ">"
    return str(x)


def parse_grammar(text: str, nonterminals=None, terminals=None) -> ContextFreeGrammar:
    """Parse ``S -> a S b | eps`` lines; the first left side is the start symbol.

    Symbols occurring on a left side are nonterminals, the rest terminals,
    unless ``nonterminals`` is given explicitly.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ParseError("expected 'A -> ...'", lineno)
        lhs, rhs = line.split("->", 1)
        lhs = lhs.strip()
        if not lhs or len(lhs.split()) != 1:
            raise ParseError("left side must be a single symbol", lineno)
        for alt in rhs.split("|"):
            toks = alt.split()
            if toks == [EPS_TOKEN]:
                toks = []
            elif EPS_TOKEN in toks:
                raise ParseError("'eps' must stand alone", lineno)
            rows.append((lhs, tuple(toks)))
    if not rows:
        raise ParseError("grammar has no productions")
    nts = list(dict.fromkeys(l for l, _ in rows)) if nonterminals is None else list(nonterminals)
    ntset = set(nts)
    ts = [] if terminals is None else list(terminals)
    for _, rhs in rows:
        for x in rhs:
            if x not in ntset and x not in ts:
                ts.append(x)
    return ContextFreeGrammar(tuple(nts), tuple(ts), tuple(rows), rows[0][0])


@dataclass(frozen=True)
class CfgAnalysis:
    empty: bool
    generating: frozenset
    reachable: frozenset


def _generating(g: ContextFreeGrammar) -> set:
    nts = g.nonterminal_set
    gen: set = set()
    # counter-based fixpoint: production fires when all its nonterminals are generating
    missing = []
    waiting = defaultdict(list)
    todo = []
    for idx, (lhs, rhs) in enumerate(g.productions):
        need = {x for x in rhs if x in nts}
        missing.append(len(need))
        for x in need:
            waiting[x].append(idx)
        if not need:
            todo.append(lhs)
    while todo:
        x = todo.pop()
        if x in gen:
            continue
        gen.add(x)
        for idx in waiting.get(x, ()):
            missing[idx] -= 1
            if missing[idx] == 0:
                todo.append(g.productions[idx][0])
    return gen


def cfg_analyze(g: ContextFreeGrammar) -> CfgAnalysis:
    """Generating and reachable nonterminals; ``empty`` iff the start is not generating.

    Reachability is computed through productions whose symbols are all
    generating, so ``generating & reachable`` is the set of useful symbols.
    """
    gen = _generating(g)
    reach = set()
    if g.start in gen:
        reach.add(g.start)
        todo = [g.start]
        nts = g.nonterminal_set
        while todo:
            x = todo.pop()
            for rhs in g.by_lhs.get(x, ()):
                if all(y in gen for y in rhs if y in nts):
                    for y in rhs:
                        if y in nts and y not in reach:
                            reach.add(y)
                            todo.append(y)
    return CfgAnalysis(g.start not in gen, frozenset(gen), frozenset(reach))


def trim(g: ContextFreeGrammar) -> ContextFreeGrammar:
    """Remove useless nonterminals and the productions using them.

    Terminals and the start symbol are kept even when unused so that Parikh
    vectors keep their dimension.
    """
    info = cfg_analyze(g)
    useful = info.generating & info.reachable
    nts = g.nonterminal_set
    prods = tuple(
        (lhs, rhs)
        for lhs, rhs in g.productions
        if lhs in useful and all(x in useful for x in rhs if x in nts)
    )
    keep = tuple(n for n in g.nonterminals if n in useful or n == g.start)
    return ContextFreeGrammar(keep, g.terminals, prods, g.start)


def is_trimmed(g: ContextFreeGrammar) -> bool:
    info = cfg_analyze(g)
    if not g.productions:
        return True
    useful = info.generating & info.reachable
    return all(n in useful for n in g.nonterminals)


# --- CYK ------------------------------------------------------------------


class _Binarized:
    """Binarized copy of a grammar with nullable-aware unit closure."""

    def __init__(self, g: ContextFreeGrammar):
        nts = g.nonterminal_set
        fresh = itertools.count()
        term_nt = {}
        rules = []  # (lhs, rhs) with |rhs| <= 2 over nonterminals, or (lhs, (terminal,)) lexical
        lexical = defaultdict(set)
        for lhs, rhs in g.productions:
            if len(rhs) == 1 and rhs[0] not in nts:
                lexical[rhs[0]].add(lhs)
                continue
            syms = []
            for x in rhs:
                if x in nts:
                    syms.append(x)
                else:
                    if x not in term_nt:
                        term_nt[x] = ("#t", x)
                        lexical[x].add(term_nt[x])
                    syms.append(term_nt[x])
            cur = lhs
            while len(syms) > 2:
                nxt = ("#b", next(fresh))
                rules.append((cur, (syms[0], nxt)))
                cur, syms = nxt, syms[1:]
            rules.append((cur, tuple(syms)))
        nullable = set()
        changed = True
        while changed:
            changed = False
            for lhs, rhs in rules:
                if lhs not in nullable and all(x in nullable for x in rhs):
                    nullable.add(lhs)
                    changed = True
        unit = defaultdict(set)  # child -> parents with parent =>* child in one unit step
        binary = []
        for lhs, rhs in rules:
            if len(rhs) == 1:
                unit[rhs[0]].add(lhs)
            elif len(rhs) == 2:
                b, c = rhs
                binary.append((lhs, b, c))
                if b in nullable:
                    unit[c].add(lhs)
                if c in nullable:
                    unit[b].add(lhs)
        self.nullable = nullable
        self.unit = unit
        self.by_pair = defaultdict(set)
        for lhs, b, c in binary:
            self.by_pair[(b, c)].add(lhs)
        self.lexical = lexical
        self.start = g.start

    def close(self, cell: set) -> set:
        todo = list(cell)
        while todo:
            x = todo.pop()
            for p in self.unit.get(x, ()):
                if p not in cell:
                    cell.add(p)
                    todo.append(p)
        return cell


def cfg_membership(g: ContextFreeGrammar, word) -> bool:
    """CYK test on an internal binarized copy; ``g`` itself is not rewritten."""
    word = as_word(word)
    b = _binarized(g)
    n = len(word)
    if n == 0:
        return g.start in b.nullable
    table = {}
    for i, a in enumerate(word):
        table[i, i + 1] = b.close(set(b.lexical.get(a, ())))
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span
            cell = set()
            for k in range(i + 1, j):
                left, right = table[i, k], table[k, j]
                if not left or not right:
                    continue
                for x in left:
                    for y in right:
                        cell |= b.by_pair.get((x, y), set())
            table[i, j] = b.close(cell)
    return g.start in table[0, n]


_BIN_CACHE: dict = {}


def _binarized(g):
    key = id(g)
    hit = _BIN_CACHE.get(key)
    if hit is not None and hit[0] is g:
        return hit[1]
    b = _Binarized(g)
    if len(_BIN_CACHE) > 64:
        _BIN_CACHE.clear()
    _BIN_CACHE[key] = (g, b)
    return b


# --- bounded Parikh image -------------------------------------------------


def cfg_parikh_box(g: ContextFreeGrammar, bound: int) -> frozenset:
    """``Parikh(L(g))`` restricted to vectors with every component ``<= bound``.

    Least fixpoint over per-nonterminal vector sets. Components saturate at
    ``bound + 1`` (overflow), which keeps the sets finite and is exact for
    every vector inside the box because Parikh vectors of subderivations are
    componentwise below that of the whole derivation.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    k = len(g.terminals)
    cap = bound + 1
    tindex = {t: i for i, t in enumerate(g.terminals)}
    nts = g.nonterminal_set
    sets = {n: set() for n in g.nonterminals}

    def add(u, v):
        return tuple(min(a + b, cap) for a, b in zip(u, v))

    zero = (0,) * k
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            acc = {zero}
            for x in rhs:
                if x in nts:
                    src = sets[x]
                    if not src:
                        acc = set()
                        break
                    acc = {add(u, v) for u in acc for v in src}
                else:
                    e = [0] * k
                    e[tindex[x]] = 1
                    e = tuple(e)
                    acc = {add(u, e) for u in acc}
            new = acc - sets[lhs]
            if new:
                sets[lhs] |= new
                changed = True
    return frozenset(v for v in sets[g.start] if all(c <= bound for c in v))
