"""Tokenization, n-gram extraction, corpus reading and vocabulary counting."""

from __future__ import annotations

import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from itertools import chain
from typing import Hashable, Iterable, Iterator, Sequence

logger = logging.getLogger(__name__)

TOKENIZER_MODES = ("whitespace", "lowercase-whitespace")

Token = Hashable
NGram = tuple


class CorpusParseError(ValueError):
    """Raised when corpus lines cannot be parsed.

    ``errors`` holds ``(line_number, message)`` pairs, 1-based.
    """

    def __init__(self, path: str, errors: list[tuple[int, str]]):
        self.path = path
        self.errors = errors
        shown = "; ".join(f"line {ln}: {msg}" for ln, msg in errors[:5])
        more = f" (+{len(errors) - 5} more)" if len(errors) > 5 else ""
        super().__init__(f"{path}: {len(errors)} unparseable line(s): {shown}{more}")


def tokenize(text: str | bytes, mode: str = "whitespace") -> list[str]:
    """Split ``text`` on runs of Unicode whitespace.

    ``lowercase-whitespace`` additionally case-folds every token. Bytes are
    decoded as strict UTF-8, so malformed input raises ``UnicodeDecodeError``.
    """
    if mode not in TOKENIZER_MODES:
        raise ValueError(f"unknown tokenizer mode {mode!r}; expected one of {TOKENIZER_MODES}")
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8")
    if mode == "lowercase-whitespace":
        text = text.casefold()
    return text.split()


def ngrams(seq: Sequence[Token], n: int) -> list[NGram]:
    """Return the ``len(seq) - n + 1`` contiguous n-grams of ``seq`` as tuples."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    seq = tuple(seq)
    return [seq[i:i + n] for i in range(len(seq) - n + 1)]


@dataclass(frozen=True)
class ResponseSet:
    """A set of tokenized responses.

    Tokens are opaque hashables compared by equality; responses may be empty.
    """

    responses: tuple[tuple[Token, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(tuple(r) for r in self.responses))

    @classmethod
    def from_texts(cls, texts: Iterable[str], mode: str = "whitespace") -> "ResponseSet":
        return cls(tuple(tuple(tokenize(t, mode)) for t in texts))

    @property
    def size(self) -> int:
        return len(self.responses)

    @property
    def lengths(self) -> list[int]:
        return [len(r) for r in self.responses]

    @property
    def total_tokens(self) -> int:
        return sum(len(r) for r in self.responses)

    def ngram_counts(self, n: int) -> Counter:
        """Census of n-grams over all responses; n-grams never span responses."""
        if n == 1:
            return Counter((t,) for t in chain.from_iterable(self.responses))
        return Counter(chain.from_iterable(ngrams(r, n) for r in self.responses))

    def __len__(self) -> int:
        return len(self.responses)


def count_vocab(lines: Iterable[str], mode: str = "whitespace") -> tuple[int, Counter]:
    """Count unique tokens over a stream of lines.

    Returns ``(V, census)`` where the census maps token to frequency.
    """
    census: Counter = Counter()
    for line in lines:
        census.update(tokenize(line, mode))
    return len(census), census


def count_ngram_vocab(lines: Iterable[str], n: int, mode: str = "whitespace") -> int:
    """Number of distinct n-grams observed over a stream of lines."""
    seen: set = set()
    for line in lines:
        seen.update(ngrams(tokenize(line, mode), n))
    return len(seen)


def _iter_jsonl(path: str, fh, lenient: bool) -> Iterator[str]:
    errors: list[tuple[int, str]] = []
    for lineno, raw in enumerate(fh, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
            if not isinstance(obj, dict) or "response" not in obj:
                raise ValueError("missing field 'response'")
            value = obj["response"]
            if not isinstance(value, str):
                raise ValueError("field 'response' is not a string")
        except ValueError as exc:
            errors.append((lineno, str(exc)))
            continue
        yield value
    if errors:
        if not lenient:
            raise CorpusParseError(path, errors)
        for lineno, msg in errors:
            logger.warning("%s:%d skipped: %s", path, lineno, msg)


def detect_format(path: str) -> str:
    return "jsonl" if path.endswith((".jsonl", ".ndjson")) else "text"


def read_responses(path: str | os.PathLike, fmt: str | None = None, lenient: bool = False) -> list[str]:
    """Read one response per line from plain text or JSON-lines.

    Plain-text lines keep their order and include empty lines (empty
    responses). JSON-lines records must carry a string ``response`` field;
    bad records raise :class:`CorpusParseError` unless ``lenient``.
    UTF-8 decoding errors are re-raised with the file name attached.
    """
    path = os.fspath(path)
    fmt = fmt or detect_format(path)
    if fmt not in ("text", "jsonl"):
        raise ValueError(f"unknown corpus format {fmt!r}")
    with open(path, encoding="utf-8", newline="") as fh:
        try:
            if fmt == "jsonl":
                return list(_iter_jsonl(path, fh, lenient))
            return [line.rstrip("\r\n") for line in fh]
        except UnicodeDecodeError as exc:
            raise UnicodeDecodeError(
                exc.encoding, exc.object, exc.start, exc.end, f"{exc.reason} in {path}"
            ) from None
