"""Verdict records returned by the emptiness engines and by the oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

NON_EMPTY = "non-empty"
EMPTY_WITHIN_BOUND = "empty-within-bound"
EMPTY_PROVED_EXTERNALLY = "empty-proved-externally"
UNKNOWN = "unknown"


@dataclass
class EmptinessVerdict:
    """Outcome of an emptiness query modulo a bounded expression.

    ``kind`` is one of the module-level constants. For ``non-empty`` verdicts
    ``exponents`` and ``word`` hold the witness and ``verified`` records
    whether the exact membership test accepted it.
    """

    kind: str
    exponents: tuple[int, ...] | None = None
    word: tuple | None = None
    verified: bool = False
    bound: int | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def non_empty(cls, exponents, word, verified, **stats):
        return cls(NON_EMPTY, tuple(exponents), tuple(word), verified, stats=dict(stats))

    @classmethod
    def empty_within(cls, bound, **stats):
        return cls(EMPTY_WITHIN_BOUND, bound=bound, stats=dict(stats))

    @property
    def is_non_empty(self) -> bool:
        return self.kind == NON_EMPTY

    def to_json(self, word_format=None) -> dict:
        out: dict[str, Any] = {"verdict": self.kind, "verified": self.verified}
        if self.kind == NON_EMPTY:
            word = list(self.word) if word_format is None else word_format(self.word)
            out["witness"] = {"exponents": list(self.exponents), "word": word}
        else:
            out["witness"] = None
        if self.bound is not None:
            out["bound"] = self.bound
        out["stats"] = self.stats
        return out
