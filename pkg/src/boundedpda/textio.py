"""Line-oriented text formats for multi-head PDAs, counter machines and CFSMs.

The first keyword of a file names the format. Lines starting with ``#``
are comments (only whole lines, since ``#`` may start a symbol). Examples::

    mhpda
    heads 2
    alphabet 0 1 &
    stack ⊥ A
    init q_up ⊥
    final q_f
    select q_up 2
    q_up ⊥ 0 -> q_up A ⊥
    q_f ⊥ $ -> q_f eps

    cm
    counters c1 c2
    stack A .
    init s0 .
    t1: s0 . inc c1 -> s1 A.
    s1 dec c1 -> s2

    cfsm
    channels q1 q2
    msgs 0 1
    init s0
    s0 send q1 0 -> s1
    s1 recv q1 0 -> s2
    s2 nop -> s0

In the ``mhpda`` format a transition is ``src pop read -> dst push...``
with the push word top first, ``eps`` for an empty read or push and ``$``
for the endmarker. In the ``cm`` format ``.`` is the default bottom symbol;
a transition names the popped symbol and the pushed word (one token, split
into characters) or omits both to leave the stack alone.

Counter and channel declarations may be combined under the ``cm`` header
for mixed machines. An optional ``target s`` line records a reachability
target. Unnamed transitions are called ``t1, t2, ...`` in file order.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ModelError, ParseError
from .frontends.models import StorageMachine, Transition
from .mhpda import Tpda
from .words import EPS_TOKEN

FORMATS = ("mhpda", "cm", "cfsm")
CM_BOTTOM = "."
_OPS = {"inc": 1, "dec": 1, "zero": 1, "zerotest": 1, "send": 2, "recv": 2, "nop": 0}


@dataclass
class ParsedModel:
    kind: str
    machine: object
    target: object = None


def _lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield no, line


def detect_format(text: str) -> str:
    for _, line in _lines(text):
        head = line.split()[0]
        if head in FORMATS:
            return head
        break
    raise ParseError("unknown format: the first keyword must be one of mhpda, cm, cfsm", 1)


def parse_model(text: str, fmt: str | None = None, source=None) -> ParsedModel:
    fmt = fmt or detect_format(text)
    if fmt == "mhpda":
        return ParsedModel("mhpda", parse_mhpda(text, source))
    if fmt in ("cm", "cfsm"):
        return parse_storage(text, fmt, source)
    raise ParseError(f"unknown format {fmt!r}", None, source)


def load_model(path, fmt=None) -> ParsedModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), fmt, source=str(path))


# --- mhpda ---------------------------------------------------------------


def _int(tok, i, no, source) -> int:
    try:
        return int(tok[i])
    except (IndexError, ValueError):
        raise ParseError(f"expected an integer after {tok[0]!r}", no, source) from None


def parse_mhpda(text: str, source=None) -> Tpda:
    heads = None
    alphabet, stack, finals, trs, select = [], [], [], [], {}
    init = None
    states = []
    seen_header = False
    for no, line in _lines(text):
        tok = line.split()
        key = tok[0]
        if not seen_header:
            if key != "mhpda":
                raise ParseError("expected the 'mhpda' header", no, source)
            seen_header = True
            continue
        if key == "heads":
            heads = _int(tok, 1, no, source)
        elif key == "alphabet":
            alphabet += tok[1:]
        elif key == "stack":
            stack += tok[1:]
        elif key == "states":
            states += tok[1:]
        elif key == "init":
            if len(tok) != 3:
                raise ParseError("'init' needs a state and a stack symbol", no, source)
            init = (tok[1], tok[2])
        elif key == "final":
            finals += tok[1:]
        elif key == "select":
            if len(tok) != 3:
                raise ParseError("'select' needs a state and a head", no, source)
            select[tok[1]] = _int(tok, 2, no, source)
        elif "->" in tok:
            k = tok.index("->")
            if k != 3 or len(tok) < 5:
                raise ParseError("transition must read 'src pop read -> dst push...'", no, source)
            src, pop, read = tok[:3]
            dst, push = tok[4], tok[5:]
            read = None if read == EPS_TOKEN else read
            push = () if push == [EPS_TOKEN] else tuple(push)
            trs.append((src, read, pop, dst, push))
        else:
            raise ParseError(f"unknown keyword {key!r}", no, source)
    if not seen_header:
        raise ParseError("empty model file", None, source)
    if heads is None or init is None:
        raise ParseError("'heads' and 'init' are required", None, source)
    all_states = set(states) | set(select) | {init[0]} | set(finals)
    for t in trs:
        all_states |= {t[0], t[3]}
    try:
        return Tpda(all_states, alphabet, stack, trs, select, init[0], init[1], finals, heads)
    except ModelError as exc:
        raise ParseError(str(exc), None, source) from None


def _tok(x) -> str:
    # constructed machines use tuples as names; flatten them into one token
    return x if isinstance(x, str) else repr(x).replace(" ", "")


def dump_mhpda(A: Tpda) -> str:
    def names(xs):
        return " ".join(sorted(map(_tok, xs)))

    out = ["mhpda", f"heads {A.heads}", "alphabet " + " ".join(map(_tok, A.alphabet)),
           "stack " + " ".join(map(_tok, A.stack_alphabet)),
           "states " + names(A.states),
           f"init {_tok(A.initial)} {_tok(A.initial_stack)}"]
    if A.finals:
        out.append("final " + names(A.finals))
    out += [f"select {_tok(s)} {A.select[s]}" for s in sorted(A.states, key=_tok)]
    for t in A.transitions:
        read = EPS_TOKEN if t.read is None else _tok(t.read)
        push = " ".join(map(_tok, t.push)) if t.push else EPS_TOKEN
        out.append(f"{_tok(t.src)} {_tok(t.pop)} {read} -> {_tok(t.dst)} {push}")
    return "\n".join(out) + "\n"


# --- counter machines and CFSMs -----------------------------------------------


def _split_push(token, gamma):
    if token == EPS_TOKEN:
        return ()
    if token in gamma:
        return (token,)
    if "." in token and token != CM_BOTTOM and all(x in gamma for x in token.split(".")):
        return tuple(token.split("."))
    return tuple(token)


def _parse_op(tok, no, source):
    key = tok[0]
    arity = _OPS.get(key)
    if arity is None:
        raise ParseError(f"unknown operation {key!r}", no, source)
    if len(tok) != arity + 1:
        raise ParseError(f"'{key}' takes {arity} argument(s)", no, source)
    if key == "zerotest":
        key = "zero"
    return (key, *tok[1:])


def parse_storage(text: str, fmt: str | None = None, source=None) -> ParsedModel:
    counters, channels, msgs, stack, states = [], [], [], [], []
    init = bottom = target = None
    raw_trs = []
    header = None
    for no, line in _lines(text):
        name = None
        if ":" in line.split()[0]:
            name, _, line = line.partition(":")
            name, line = name.strip(), line.strip()
            if not name or not line:
                raise ParseError("malformed transition name", no, source)
        tok = line.split()
        key = tok[0]
        if header is None:
            if key not in ("cm", "cfsm"):
                raise ParseError("expected the 'cm' or 'cfsm' header", no, source)
            header = key
            continue
        if name is None and key == "counters":
            counters += tok[1:]
        elif name is None and key == "channels":
            channels += tok[1:]
        elif name is None and key in ("msgs", "messages"):
            msgs += tok[1:]
        elif name is None and key == "stack":
            stack += tok[1:]
        elif name is None and key == "states":
            states += tok[1:]
        elif name is None and key == "target":
            if len(tok) != 2:
                raise ParseError("'target' needs one state", no, source)
            target = tok[1]
        elif name is None and key == "init":
            if len(tok) not in (2, 3):
                raise ParseError("'init' needs a state and optionally a bottom symbol", no, source)
            init = tok[1]
            if len(tok) == 3:
                bottom = tok[2]
        elif "->" in tok:
            raw_trs.append((no, name, tok))
        else:
            raise ParseError(f"unknown keyword {key!r}", no, source)
    if header is None:
        raise ParseError("empty model file", None, source)
    if fmt is not None and fmt != header:
        raise ParseError(f"file header is {header!r}, expected {fmt!r}", None, source)
    if init is None:
        raise ParseError("missing 'init' line", None, source)
    recursive = bool(stack) or bottom is not None
    if recursive:
        bottom = bottom or CM_BOTTOM
        if bottom not in stack:
            stack.append(bottom)
    gamma = set(stack)
    trs = []
    for idx, (no, name, tok) in enumerate(raw_trs, 1):
        k = tok.index("->")
        lhs, rhs = tok[:k], tok[k + 1:]
        if not lhs or not rhs:
            raise ParseError("transition needs a source and a target", no, source)
        src, rest = lhs[0], lhs[1:]
        pop = None
        if rest and rest[0] not in _OPS:
            pop, rest = rest[0], rest[1:]
            if pop not in gamma:
                raise ParseError(f"undeclared stack symbol {pop!r}", no, source)
        if not rest:
            raise ParseError("transition has no operation", no, source)
        op = _parse_op(rest, no, source)
        if op[0] in ("inc", "dec", "zero") and op[1] not in counters:
            raise ParseError(f"undeclared counter {op[1]!r}", no, source)
        if op[0] in ("send", "recv") and (op[1] not in channels or op[2] not in msgs):
            raise ParseError(f"undeclared channel or message in {' '.join(rest)!r}", no, source)
        dst = rhs[0]
        if len(rhs) > 2:
            raise ParseError("push word must be a single token", no, source)
        push = _split_push(rhs[1], gamma) if len(rhs) == 2 else None
        if push is not None and not recursive:
            raise ParseError("push word on a machine without a stack", no, source)
        if push is not None and pop is None:
            raise ParseError("a push word needs a popped symbol", no, source)
        if pop is not None and push is None:
            push = (pop,)
        trs.append(Transition(name or f"t{idx}", src, op, dst, pop, push))
    all_states = list(states) + [init]
    for t in trs:
        all_states += [t.src, t.dst]
    if target is not None and target not in all_states:
        raise ParseError(f"target {target!r} is not a state", None, source)
    try:
        M = StorageMachine(all_states, init, trs, counters, channels, msgs,
                           tuple(stack) if recursive else None, bottom if recursive else None)
    except ModelError as exc:
        raise ParseError(str(exc), None, source) from None
    kind = header
    if header == "cm" and channels:
        kind = "mixed"
    return ParsedModel(kind, M, target)


def _push_token(push, gamma):
    if not push:
        return EPS_TOKEN
    if all(len(x) == 1 for x in gamma):
        return "".join(push)
    return ".".join(push)


def dump_storage(M: StorageMachine, target=None) -> str:
    header = "cfsm" if not M.counters and not M.recursive else "cm"
    out = [header]
    if M.counters:
        out.append("counters " + " ".join(M.counters))
    if M.channels:
        out.append("channels " + " ".join(M.channels))
    if M.messages:
        out.append("msgs " + " ".join(M.messages))
    if M.recursive:
        out.append("stack " + " ".join(M.stack_alphabet))
        out.append(f"init {M.initial} {M.bottom}")
    else:
        out.append(f"init {M.initial}")
    out.append("states " + " ".join(M.states))
    if target is not None:
        out.append(f"target {target}")
    for t in M.transitions:
        op = " ".join(("zero" if t.op[0] == "zero" else t.op[0], *t.op[1:]))
        if t.pop is not None:
            out.append(f"{t.name}: {t.src} {t.pop} {op} -> {t.dst} "
                       f"{_push_token(t.push, M.stack_alphabet)}")
        else:
            out.append(f"{t.name}: {t.src} {op} -> {t.dst}")
    return "\n".join(out) + "\n"


def dump_model(model, target=None) -> str:
    if isinstance(model, Tpda):
        return dump_mhpda(model)
    return dump_storage(model, target)
