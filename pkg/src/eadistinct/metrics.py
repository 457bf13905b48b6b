"""Distinct-n and the expectation-adjusted Distinct (EAD) score.

EAD rescales the distinct n-gram count ``N`` by the number of distinct
tokens expected when ``C`` tokens are drawn independently and uniformly from
a vocabulary of size ``V``::

    EAD = N / (V * (1 - ((V - 1) / V) ** C))

The denominator grows like ``C`` for small ``C`` and saturates at ``V``, so
unlike ``N / C`` the score does not decay just because responses get longer.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from eadistinct.text import ResponseSet

DEFAULT_VOCAB_SIZE = 30522
VOCAB_SOURCES = ("fixed", "counted-from-corpus", "ngram-derived")


class EmptyInputError(ValueError):
    """No n-grams to score."""


class VocabMismatchWarning(UserWarning):
    """The vocabulary size looks inconsistent with the scored set."""


@dataclass(frozen=True)
class VocabSpec:
    """Vocabulary size plus where it came from.

    ``origin`` is free text (a corpus path, an env var name, ...) kept for
    audit output only.
    """

    size: int = DEFAULT_VOCAB_SIZE
    source: str = "fixed"
    origin: str | None = None

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"vocabulary size must be a positive integer, got {self.size!r}")
        if self.source not in VOCAB_SOURCES:
            raise ValueError(f"unknown vocab source {self.source!r}; expected one of {VOCAB_SOURCES}")
        object.__setattr__(self, "size", int(self.size))


@dataclass(frozen=True)
class MetricReport:
    n_order: int
    n_distinct: int
    n_total: int
    distinct: float
    ead: float
    vocab: VocabSpec

    def to_dict(self) -> dict:
        return {
            "n_order": self.n_order,
            "n_distinct": self.n_distinct,
            "n_total": self.n_total,
            "vocab_size": self.vocab.size,
            "vocab_source": self.vocab.source,
            "distinct": self.distinct,
            "ead": self.ead,
        }


def expected_distinct_upper(vocab_size: int, n_total: int | float | np.ndarray) -> float | np.ndarray:
    """Expected number of distinct symbols after ``n_total`` uniform draws.

    Computes ``V * (1 - ((V-1)/V) ** C)`` as ``-V * expm1(C * log1p(-1/V))``,
    which stays accurate for ``V`` in the tens of thousands and ``C`` far
    beyond ``V``. Accepts an array of counts.
    """
    if vocab_size < 1:
        raise ValueError(f"vocabulary size must be >= 1, got {vocab_size}")
    c = np.asarray(n_total, dtype=float)
    if np.any(c < 0):
        raise ValueError("token count must be nonnegative")
    if vocab_size == 1:
        out = np.where(c > 0, 1.0, 0.0)
    else:
        out = -vocab_size * np.expm1(c * math.log1p(-1.0 / vocab_size))
        # exact at C == 1 (the expression rounds to 1 +/- ulp otherwise)
        out = np.where(c == 1, 1.0, out)
    return float(out) if out.ndim == 0 else out


def distinct_counts(responses: ResponseSet, n_order: int = 1) -> tuple[int, int]:
    """Return ``(N, C)``: unique and total n-grams across the whole set."""
    if responses.size == 0:
        raise EmptyInputError("no responses to score")
    counts = responses.ngram_counts(n_order)
    total = sum(counts.values())
    if total == 0:
        raise EmptyInputError(
            f"all {responses.size} response(s) are shorter than the n-gram order {n_order}"
        )
    return len(counts), total


def distinct(responses: ResponseSet, n_order: int = 1) -> tuple[int, int, float]:
    """Original Distinct-n: ``(N, C, N / C)``."""
    n_distinct, n_total = distinct_counts(responses, n_order)
    return n_distinct, n_total, n_distinct / n_total


def ead_from_counts(n_distinct: int, n_total: int, vocab_size: int) -> float:
    if n_total <= 0:
        raise EmptyInputError("EAD needs at least one n-gram")
    return n_distinct / expected_distinct_upper(vocab_size, n_total)


def ead(responses: ResponseSet, n_order: int = 1, vocab: VocabSpec | int | None = None) -> MetricReport:
    """Score a response set with both Distinct and EAD.

    For ``n_order > 1`` the vocabulary should describe the n-gram universe
    (``source="ngram-derived"``); passing a token-level size is allowed but
    warns, and ``V ** n`` is never substituted. The score is not clamped and
    can exceed 1.
    """
    if vocab is None:
        vocab = VocabSpec()
    elif not isinstance(vocab, VocabSpec):
        vocab = VocabSpec(int(vocab))
    if n_order > 1 and vocab.source != "ngram-derived":
        warnings.warn(
            f"EAD at n={n_order} is using a token-level vocabulary size ({vocab.size}); "
            "supply an n-gram vocabulary size for a meaningful denominator",
            VocabMismatchWarning,
            stacklevel=2,
        )
    n_distinct, n_total, score = distinct(responses, n_order)
    if n_distinct > vocab.size:
        warnings.warn(
            f"{n_distinct} distinct n-grams exceed the vocabulary size {vocab.size}; "
            "check the tokenizer/vocabulary pairing",
            VocabMismatchWarning,
            stacklevel=2,
        )
    return MetricReport(
        n_order=n_order,
        n_distinct=n_distinct,
        n_total=n_total,
        distinct=score,
        ead=ead_from_counts(n_distinct, n_total, vocab.size),
        vocab=vocab,
    )


def expected_distinct_exact_iid(pmf: Sequence[float], lengths: Sequence[int]) -> float:
    """Expected distinct count when every token is drawn i.i.d. from ``pmf``.

    Symbol ``j`` is absent from a response of length ``t`` with probability
    ``(1 - p_j) ** t``, so the expectation is
    ``sum_j (1 - prod_k (1 - p_j) ** t_k) = sum_j -expm1(T * log1p(-p_j))``
    with ``T = sum(lengths)``.
    """
    p = np.asarray(pmf, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("pmf must be a nonempty 1-d vector")
    if np.any(p < 0):
        raise ValueError("pmf has negative entries")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"pmf sums to {p.sum()!r}, not 1")
    if any(t < 0 for t in lengths):
        raise ValueError("lengths must be nonnegative")
    total = float(sum(lengths))
    if total == 0:
        return 0.0
    with np.errstate(divide="ignore"):
        log_absent = np.where(p >= 1.0, -np.inf, np.log1p(-np.minimum(p, 1.0)))
    present = -np.expm1(total * log_absent)
    return float(present.sum())
