"""Counter machines, communicating finite-state machines and their interpreters.

Both models are instances of :class:`StorageMachine`: a control graph whose
transitions carry one storage operation. Operations are tuples

    ("inc", c)  ("dec", c)  ("zero", c)          counters
    ("send", ch, m)  ("recv", ch, m)              FIFO channels
    ("nop",)                                      control flow only

A machine with a stack alphabet is recursive: each transition may pop a
symbol and push a word (top first). ``pop=None`` leaves the stack alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import ModelError, UnknownTargetState, UnknownTransition

COUNTER_OPS = ("inc", "dec", "zero")
CHANNEL_OPS = ("send", "recv")


@dataclass(frozen=True)
class Transition:
    name: str
    src: object
    op: tuple
    dst: object
    pop: object = None
    push: tuple | None = None

    @property
    def kind(self) -> str:
        return self.op[0]

    def storage(self):
        """The counter or channel the operation acts on (``None`` for nop)."""
        return None if self.op[0] == "nop" else self.op[1]

    def describe(self) -> str:
        if self.op[0] in COUNTER_OPS:
            return f"{self.op[0]}({self.op[1]})"
        if self.op[0] == "send":
            return f"!{self.op[2]}:{self.op[1]}"
        if self.op[0] == "recv":
            return f"?{self.op[2]}:{self.op[1]}"
        return "nop"


@dataclass(frozen=True, eq=False)
class StorageMachine:
    states: tuple
    initial: object
    transitions: tuple
    counters: tuple = ()
    channels: tuple = ()
    messages: tuple = ()
    stack_alphabet: tuple | None = None
    bottom: object = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(dict.fromkeys(self.states)))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "counters", tuple(self.counters))
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "messages", tuple(self.messages))
        if self.stack_alphabet is not None:
            object.__setattr__(self, "stack_alphabet", tuple(self.stack_alphabet))
            if self.bottom not in self.stack_alphabet:
                raise ModelError("the bottom symbol must be a stack symbol")
        states = set(self.states)
        if self.initial not in states:
            raise ModelError("initial state is not a state")
        names = set()
        for t in self.transitions:
            if t.name in names:
                raise ModelError(f"duplicate transition name {t.name!r}")
            names.add(t.name)
            if t.src not in states or t.dst not in states:
                raise ModelError(f"transition {t.name} uses an undeclared state")
            self._check_op(t)
            if t.pop is not None or t.push:
                if self.stack_alphabet is None:
                    raise ModelError(f"transition {t.name} uses the stack of a stackless machine")
                gamma = set(self.stack_alphabet)
                if (t.pop is not None and t.pop not in gamma) or any(x not in gamma for x in t.push or ()):
                    raise ModelError(f"transition {t.name} uses an undeclared stack symbol")

    def _check_op(self, t):
        op = t.op
        if op[0] in COUNTER_OPS:
            if len(op) != 2 or op[1] not in self.counters:
                raise ModelError(f"transition {t.name} uses undeclared counter {op[1:]!r}")
        elif op[0] in CHANNEL_OPS:
            if len(op) != 3 or op[1] not in self.channels:
                raise ModelError(f"transition {t.name} uses undeclared channel {op[1:]!r}")
            if op[2] not in self.messages:
                raise ModelError(f"transition {t.name} uses undeclared message {op[2]!r}")
        elif op != ("nop",):
            raise ModelError(f"unknown operation {op!r}")

    @property
    def alphabet(self) -> tuple:
        return tuple(t.name for t in self.transitions)

    @property
    def recursive(self) -> bool:
        return self.stack_alphabet is not None

    def transition(self, name) -> Transition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise UnknownTransition(f"no transition named {name!r}")

    @property
    def by_name(self) -> dict:
        return {t.name: t for t in self.transitions}

    def check_target(self, s_f):
        if s_f not in set(self.states):
            raise UnknownTargetState(f"{s_f!r} is not a control state")

    def size(self) -> int:
        return len(self.states) + sum(3 + len(t.push or ()) for t in self.transitions)


def CounterMachine(states, initial, transitions, counters, stack_alphabet=None, bottom=None,
                   channels=(), messages=()) -> StorageMachine:
    """A (recursive) counter machine; ``channels`` makes it a mixed machine."""
    if stack_alphabet is None:
        stack_alphabet, bottom = ("⊥",), "⊥"
    return StorageMachine(states, initial, transitions, counters, channels, messages,
                          stack_alphabet, bottom)


def Cfsm(states, initial, transitions, channels, messages) -> StorageMachine:
    """A communicating finite-state machine (no stack, no counters)."""
    return StorageMachine(states, initial, transitions, (), channels, messages)


# --- interpreters -------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    state: object
    stack: tuple = ()
    counters: tuple = ()
    channels: tuple = ()

    def to_json(self, M: StorageMachine) -> dict:
        out = {"state": str(self.state)}
        if M.recursive:
            out["stack"] = [str(x) for x in self.stack]
        if M.counters:
            out["counters"] = dict(zip(M.counters, self.counters))
        if M.channels:
            out["channels"] = {c: list(x) for c, x in zip(M.channels, self.channels)}
        return out


@dataclass(frozen=True)
class Infeasible:
    """The run is blocked at ``index`` (0-based position in the word)."""

    index: int
    transition: str
    reason: str

    def __bool__(self):
        return False


def initial_configuration(M: StorageMachine) -> Configuration:
    stack = (M.bottom,) if M.recursive else ()
    return Configuration(M.initial, stack, (0,) * len(M.counters), ((),) * len(M.channels))


def apply(M: StorageMachine, c: Configuration, t: Transition):
    """``c R_t c'``: the successor configuration or a reason string."""
    if c.state != t.src:
        return f"control is in {c.state!r}, not {t.src!r}"
    stack = c.stack
    if t.pop is not None:
        if not stack or stack[0] != t.pop:
            return f"stack top is not {t.pop!r}"
        stack = tuple(t.push or ()) + stack[1:]
    elif t.push:
        stack = tuple(t.push) + stack
    counters, channels = c.counters, c.channels
    kind = t.op[0]
    if kind in COUNTER_OPS:
        i = M.counters.index(t.op[1])
        v = counters[i]
        if kind == "inc":
            v += 1
        elif kind == "dec":
            if v == 0:
                return f"decrement of {t.op[1]} at zero"
            v -= 1
        elif v != 0:
            return f"zero test of {t.op[1]} at {v}"
        counters = counters[:i] + (v,) + counters[i + 1:]
    elif kind in CHANNEL_OPS:
        i = M.channels.index(t.op[1])
        x = channels[i]
        if kind == "send":
            x = x + (t.op[2],)
        else:
            if not x:
                return f"receive from empty channel {t.op[1]}"
            if x[0] != t.op[2]:
                return f"channel {t.op[1]} holds {x[0]!r} at its head, not {t.op[2]!r}"
            x = x[1:]
        channels = channels[:i] + (x,) + channels[i + 1:]
    return Configuration(t.dst, stack, counters, channels)


def run(M: StorageMachine, word: Iterable, trace=False):
    """Apply the transitions of ``word`` from the initial configuration.

    Returns the reached configuration (or the list of visited configurations
    when ``trace`` is set) or :class:`Infeasible` at the first blocked step.
    """
    table = M.by_name
    c = initial_configuration(M)
    seen = [c]
    for idx, name in enumerate(word):
        t = name if isinstance(name, Transition) else table.get(name)
        if t is None:
            raise UnknownTransition(f"no transition named {name!r}")
        nxt = apply(M, c, t)
        if isinstance(nxt, str):
            return Infeasible(idx, t.name, nxt)
        c = nxt
        seen.append(c)
    return seen if trace else c


def cm_run(M: StorageMachine, word, trace=False):
    return run(M, word, trace)


def cfsm_run(M: StorageMachine, word, trace=False):
    return run(M, word, trace)


def reaches(M: StorageMachine, word, s_f, convention: str = "end") -> bool:
    """Whether ``word`` is feasible and reaches ``s_f``.

    ``"end"`` asks for the final configuration to be in ``s_f``; ``"prefix"``
    accepts any visited configuration of a feasible prefix.
    """
    if convention == "end":
        c = run(M, word)
        return bool(c) and c.state == s_f
    if convention == "prefix":
        table = M.by_name
        c = initial_configuration(M)
        if c.state == s_f:
            return True
        for name in word:
            t = table.get(name)
            if t is None:
                raise UnknownTransition(f"no transition named {name!r}")
            c = apply(M, c, t)
            if isinstance(c, str):
                return False
            if c.state == s_f:
                return True
        return False
    raise ValueError(f"unknown convention {convention!r}")


@dataclass
class _Builder:
    """Helper for assembling machines transition by transition."""

    states: list = field(default_factory=list)
    transitions: list = field(default_factory=list)

    def state(self, name):
        if name not in self.states:
            self.states.append(name)
        return name

    def add(self, name, src, op, dst, pop=None, push=None):
        self.state(src)
        self.state(dst)
        self.transitions.append(Transition(name, src, op, dst, pop, push))

    def loop(self, prefix, at, ops):
        """A cycle at ``at`` performing ``ops`` in order through fresh states."""
        cur = at
        for j, (label, op) in enumerate(ops):
            nxt = at if j == len(ops) - 1 else self.state(f"{at}~{prefix}{j + 1}")
            self.add(label, cur, op, nxt)
            cur = nxt
