"""Words, Parikh vectors and bounded expressions ``w_1^* ... w_n^*``.

Words are tuples of symbols. Any hashable value may serve as a symbol; plain
strings passed where a word is expected are split into characters.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import DimensionMismatch, EmptySegment, NoSegments, UnknownSymbol

Symbol = Hashable
Word = tuple

EPS_TOKEN = "eps"
ENDMARKER = "$"


def as_word(word) -> Word:
    """Normalize a string or sequence of symbols to a tuple."""
    if isinstance(word, tuple):
        return word
    if isinstance(word, str):
        return tuple(word)
    return tuple(word)


def parikh(word, alphabet: Sequence[Symbol]) -> tuple[int, ...]:
    """Count occurrences of each letter of ``alphabet`` (in its given order)."""
    index = {a: i for i, a in enumerate(alphabet)}
    counts = [0] * len(alphabet)
    for letter in as_word(word):
        try:
            counts[index[letter]] += 1
        except KeyError:
            raise UnknownSymbol(f"letter {letter!r} not in alphabet {tuple(alphabet)!r}") from None
    return tuple(counts)


def format_word(word, sep: str | None = None) -> str:
    word = as_word(word)
    if not word:
        return ""
    if sep is None:
        sep = "" if all(isinstance(a, str) and len(a) == 1 for a in word) else " "
    return sep.join(str(a) for a in word)


@dataclass(frozen=True)
class BoundedExpression:
    """The regular expression ``w_1^* ... w_n^*`` with non-empty words ``w_i``."""

    segments: tuple[Word, ...]

    def __post_init__(self):
        segs = tuple(as_word(s) for s in self.segments)
        if not segs:
            raise NoSegments("a bounded expression needs at least one segment")
        for i, s in enumerate(segs, 1):
            if not s:
                raise EmptySegment(f"segment {i} is empty")
        object.__setattr__(self, "segments", segs)

    @property
    def n(self) -> int:
        return len(self.segments)

    def size(self) -> int:
        return 1 + sum(len(s) for s in self.segments)

    @property
    def letter_bounded(self) -> bool:
        return all(len(s) == 1 for s in self.segments)

    @property
    def letters(self) -> tuple:
        seen = {}
        for s in self.segments:
            for a in s:
                seen.setdefault(a, None)
        return tuple(seen)

    def expand(self, exponents: Sequence[int]) -> Word:
        return expand(self, exponents)

    def __str__(self):
        parts = []
        for s in self.segments:
            text = format_word(s, "" if all(isinstance(a, str) and len(a) == 1 for a in s) else ".")
            parts.append(f"({text})*" if len(s) > 1 else f"{text}*")
        return "".join(parts)

    def to_text(self) -> str:
        """Inverse of :func:`parse_bounded_expression`."""
        out = []
        for s in self.segments:
            if all(isinstance(a, str) and len(a) == 1 for a in s):
                out.append("".join(s))
            else:
                out.append(".".join(str(a) for a in s))
        return " ".join(out)


def _split_segment(token: str, alphabet) -> Word:
    if "." in token and token != ".":
        return tuple(token.split("."))
    if alphabet is not None and token in alphabet:
        return (token,)
    return tuple(token)


def parse_bounded_expression(text, alphabet: Iterable[Symbol] | None = None) -> BoundedExpression:
    """Parse the segment-list syntax.

    Segments are separated by single spaces, so ``"a "`` has an empty second
    segment. Inside a segment, letters are separated by ``.`` when the
    alphabet has multi-character symbols (``"t1.t2 t3"``); otherwise a token
    that is not itself a declared symbol is split into characters. A list of
    segment strings (or of symbol sequences) is accepted as well.
    """
    alpha = None if alphabet is None else set(alphabet)
    if isinstance(text, str):
        body = text.strip("\n")
        if not body.strip():
            raise NoSegments("no segments given")
        tokens = body.split(" ")
        segments = []
        for i, tok in enumerate(tokens, 1):
            if tok == "":
                raise EmptySegment(f"segment {i} is empty")
            segments.append(_split_segment(tok, alpha))
    else:
        segments = []
        for i, seg in enumerate(text, 1):
            if isinstance(seg, str):
                if seg == "":
                    raise EmptySegment(f"segment {i} is empty")
                segments.append(_split_segment(seg, alpha))
            else:
                segments.append(tuple(seg))
        if not segments:
            raise NoSegments("no segments given")
    if alpha is not None:
        for seg in segments:
            for a in seg:
                if a not in alpha:
                    raise UnknownSymbol(f"symbol {a!r} not in alphabet")
    return BoundedExpression(tuple(segments))


def expand(bexpr: BoundedExpression, exponents: Sequence[int]) -> Word:
    """``(k_1, ..., k_n) -> w_1^{k_1} ... w_n^{k_n}``."""
    exponents = tuple(exponents)
    if len(exponents) != bexpr.n:
        raise DimensionMismatch(f"expected {bexpr.n} exponents, got {len(exponents)}")
    out: list = []
    for seg, k in zip(bexpr.segments, exponents):
        if k < 0:
            raise ValueError("exponents must be natural numbers")
        out.extend(seg * k)
    return tuple(out)


def sum_lex_order(n: int, bound: int):
    """All vectors of ``[0, bound]^n`` ordered by sum, then lexicographically."""
    for total in range(n * bound + 1):
        yield from _compositions(n, total, bound)


def _compositions(n, total, bound):
    if n == 0:
        if total == 0:
            yield ()
        return
    if n == 1:
        if total <= bound:
            yield (total,)
        return
    for first in range(max(0, total - bound * (n - 1)), min(bound, total) + 1):
        for rest in _compositions(n - 1, total - first, bound):
            yield (first,) + rest
