"""Reproducible synthetic and corpus-backed response-set sampling.

The synthetic ("designated") source draws each token id as a Poisson count
whose rate is itself uniform on ``(0, v)``::

    P(X = k) = integral_0^v  lam**k * exp(-lam) / (v * k!)  dlam
             = P(Gamma(k + 1) <= v) / v

which is close to uniform on ``[0, v)`` away from the upper edge. Draws of
``k >= v`` are either redrawn (``resample``) or mapped to ``v - 1``
(``clamp``).
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import numpy as np
from scipy.special import gammainc

from eadistinct.text import ResponseSet, tokenize

REJECTION_POLICIES = ("resample", "clamp")
LENGTH_MATCH = ("exact", "bucket")
DEFAULT_SET_SIZE = 2000


class CorpusShortfallError(ValueError):
    """Not enough responses of the requested length to fill a set."""

    def __init__(self, length: int, available: int, needed: int, match: str):
        self.length = length
        self.available = available
        self.needed = needed
        self.match = match
        super().__init__(
            f"length {length} ({match} match): {available} qualifying responses, need {needed}"
        )


def seed_sequence(base_seed: int, *key: int) -> np.random.SeedSequence:
    """Seed for cell ``key`` derived only from ``(base_seed, key)``."""
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))


def designated_pmf(v: int, policy: str = "resample") -> np.ndarray:
    """Marginal token distribution over ``[0, v)`` after applying ``policy``."""
    k = np.arange(v)
    raw = gammainc(k + 1, v) / v
    if policy == "resample":
        return raw / raw.sum()
    if policy == "clamp":
        raw[-1] += 1.0 - raw.sum()
        return raw
    raise ValueError(f"unknown rejection policy {policy!r}")


class DesignatedSampler:
    """Token source for the uniform-rate Poisson mixture.

    Holds mutable RNG state; give each parallel worker its own instance.
    """

    def __init__(self, v: int = 30522, rng_seed: int | np.random.SeedSequence = 0,
                 rejection_policy: str = "resample"):
        if v < 1:
            raise ValueError(f"vocabulary size must be >= 1, got {v}")
        if rejection_policy not in REJECTION_POLICIES:
            raise ValueError(f"unknown rejection policy {rejection_policy!r}")
        self.v = int(v)
        self.rejection_policy = rejection_policy
        self.rng = np.random.default_rng(rng_seed)

    def draw(self, size: int | tuple[int, ...]) -> np.ndarray:
        lam = self.rng.uniform(0.0, self.v, size=size)
        k = self.rng.poisson(lam)
        if self.rejection_policy == "clamp":
            return np.minimum(k, self.v - 1)
        bad = k >= self.v
        while bad.any():
            m = int(bad.sum())
            k[bad] = self.rng.poisson(self.rng.uniform(0.0, self.v, size=m))
            bad = k >= self.v
        return k

    def sample_token(self) -> int:
        return int(self.draw(1)[0])

    def sample_set(self, length: int, set_size: int = DEFAULT_SET_SIZE) -> ResponseSet:
        if length < 1 or set_size < 1:
            raise ValueError("length and set_size must be >= 1")
        return ResponseSet(tuple(map(tuple, self.draw((set_size, length)).tolist())))


def sample_designated_set(length: int, set_size: int = DEFAULT_SET_SIZE, seed: int = 0,
                          v: int = 30522, rejection_policy: str = "resample") -> ResponseSet:
    """``set_size`` responses of exactly ``length`` synthetic tokens; pure in its arguments."""
    return DesignatedSampler(v, seed, rejection_policy).sample_set(length, set_size)


class CorpusPool:
    """Tokenized corpus indexed by response length, for repeated sampling."""

    def __init__(self, texts: Sequence[str], mode: str = "whitespace"):
        self.mode = mode
        self.by_length: dict[int, list[tuple[str, ...]]] = defaultdict(list)
        for text in texts:
            toks = tuple(tokenize(text, mode))
            if toks:
                self.by_length[len(toks)].append(toks)

    def qualifying(self, length: int, match: str = "exact") -> list[tuple[str, ...]]:
        if match == "exact":
            return self.by_length.get(length, [])
        if match == "bucket":
            return [r for L in (length - 1, length, length + 1) for r in self.by_length.get(L, [])]
        raise ValueError(f"unknown length match {match!r}; expected one of {LENGTH_MATCH}")

    def sample(self, length: int, set_size: int, seed: int | np.random.SeedSequence,
               match: str = "exact") -> ResponseSet:
        pool = self.qualifying(length, match)
        if len(pool) < set_size:
            raise CorpusShortfallError(length, len(pool), set_size, match)
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(pool), size=set_size, replace=False))
        return ResponseSet(tuple(pool[i] for i in idx))


def sample_corpus_set(corpus: Sequence[str] | CorpusPool, length: int, set_size: int = DEFAULT_SET_SIZE,
                      seed: int = 0, length_match: str = "exact", mode: str = "whitespace") -> ResponseSet:
    """Uniform sample without replacement among responses of the requested length.

    ``bucket`` matching accepts lengths ``length - 1 .. length + 1``.
    """
    pool = corpus if isinstance(corpus, CorpusPool) else CorpusPool(corpus, mode)
    return pool.sample(length, set_size, seed, length_match)
