"""Pearson, Spearman and Kendall tau-b correlation with two-sided p-values.

Pearson and Spearman p-values use the Student-t transform
``t = r * sqrt((n - 2) / (1 - r**2))`` with ``n - 2`` degrees of freedom;
the t tail is evaluated through the regularized incomplete beta function.
Kendall's p-value uses the normal approximation with tie-corrected variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

METHODS = ("pearson", "spearman", "kendall")
MAX_EXACT_N = 10


class DegenerateSampleError(ValueError):
    """Correlation is undefined for this sample (too short, or constant)."""


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    coefficient: float
    p_value: float
    n: int

    @property
    def flags(self) -> str:
        """``'‡'`` when p < 0.05, ``'†'`` when p < 0.1, else ``''``."""
        if self.p_value < 0.05:
            return "‡"
        if self.p_value < 0.1:
            return "†"
        return ""

    @property
    def significant_10(self) -> bool:
        return self.p_value < 0.1

    @property
    def significant_05(self) -> bool:
        return self.p_value < 0.05

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "coefficient": self.coefficient,
            "p_value": self.p_value,
            "n": self.n,
            "flags": {"p<0.1": self.significant_10, "p<0.05": self.significant_05, "marker": self.flags},
        }


def _paired(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"x and y must be 1-d and equally long, got {x.shape} and {y.shape}")
    if x.size < 3:
        raise DegenerateSampleError(f"need at least 3 paired observations, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("observations must be finite")
    return x, y


def student_t_sf(t: float, df: float) -> float:
    """Upper tail ``P(T > t)`` of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    tail = 0.5 * float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return tail if t >= 0 else 1.0 - tail


def student_t_cdf(t: float, df: float) -> float:
    return 1.0 - student_t_sf(t, df) if t >= 0 else student_t_sf(-t, df)


def t_test_p_value(r: float, n: int) -> float:
    """Two-sided p-value of a correlation coefficient via the t transform."""
    df = n - 2
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt(df / ((1.0 - r) * (1.0 + r)))
    return min(1.0, 2.0 * student_t_sf(abs(t), df))


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DegenerateSampleError("correlation undefined: a variable has zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    x, y = _paired(x, y)
    r = _pearson_r(x, y)
    return CorrelationResult("pearson", r, t_test_p_value(r, x.size), int(x.size))


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="mergesort")
    sorted_a = a[order]
    ranks = np.empty(a.size, dtype=float)
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _permutations(n: int) -> np.ndarray:
    """All ``n!`` permutations of ``range(n)`` as rows, built by insertion."""
    perms = np.zeros((1, 0), dtype=np.int8)
    for k in range(n):
        m = perms.shape[0]
        out = np.empty((m * (k + 1), k + 1), dtype=np.int8)
        for pos in range(k + 1):
            block = out[pos * m:(pos + 1) * m]
            block[:, :pos] = perms[:, :pos]
            block[:, pos] = k
            block[:, pos + 1:] = perms[:, pos:]
        perms = out
    return perms


def spearman_exact_p_value(x: Sequence[float], y: Sequence[float]) -> float:
    """Two-sided permutation p-value of Spearman's rho (``n <= 10``).

    Enumerates every pairing of the y-ranks with the x-ranks, so ties are
    handled exactly as they occur in the data.
    """
    rx = average_ranks(x)
    ry = average_ranks(y)
    n = rx.size
    if n > MAX_EXACT_N:
        raise ValueError(f"exact permutation test supports n <= {MAX_EXACT_N}, got {n}")
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    observed = abs(float(cx @ cy))
    tol = 1e-9 * max(1.0, observed)
    hits = 0
    perms = _permutations(n)
    for start in range(0, perms.shape[0], 500_000):
        chunk = perms[start:start + 500_000]
        stats = np.abs(cy[chunk] @ cx)
        hits += int(np.count_nonzero(stats >= observed - tol))
    return hits / perms.shape[0]


def spearman(x: Sequence[float], y: Sequence[float], exact: bool = False) -> CorrelationResult:
    """Spearman's rho: Pearson r on average ranks.

    ``exact=True`` replaces the t-approximation p-value with a full
    permutation test (small samples only).
    """
    x, y = _paired(x, y)
    rx = average_ranks(x)
    ry = average_ranks(y)
    rho = _pearson_r(rx, ry)
    p = spearman_exact_p_value(x, y) if exact else t_test_p_value(rho, x.size)
    return CorrelationResult("spearman", rho, p, int(x.size))


def _tie_sums(a: np.ndarray) -> tuple[float, float, float]:
    _, counts = np.unique(a, return_counts=True)
    t = counts[counts > 1].astype(float)
    return (
        float((t * (t - 1)).sum()),
        float((t * (t - 1) * (t - 2)).sum()),
        float((t * (t - 1) * (2 * t + 5)).sum()),
    )


def concordance_counts(x: np.ndarray, y: np.ndarray) -> tuple[int, int]:
    """``(concordant, discordant)`` pair counts; pairs tied in either variable count in neither."""
    n = x.size
    conc = disc = 0
    for i in range(n - 1):
        s = np.sign(x[i + 1:] - x[i]) * np.sign(y[i + 1:] - y[i])
        conc += int(np.count_nonzero(s > 0))
        disc += int(np.count_nonzero(s < 0))
    return conc, disc


def kendall(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Kendall's tau-b with a normal-approximation two-sided p-value."""
    x, y = _paired(x, y)
    n = x.size
    n0 = n * (n - 1) / 2.0
    tx1, tx2, tx3 = _tie_sums(x)
    ty1, ty2, ty3 = _tie_sums(y)
    n1 = tx1 / 2.0
    n2 = ty1 / 2.0
    if n1 == n0 or n2 == n0:
        raise DegenerateSampleError("correlation undefined: a variable is constant")
    conc, disc = concordance_counts(x, y)
    s = conc - disc
    tau = s / math.sqrt((n0 - n1) * (n0 - n2))
    tau = max(-1.0, min(1.0, tau))
    var = (
        (n * (n - 1) * (2 * n + 5) - tx3 - ty3) / 18.0
        + tx1 * ty1 / (2.0 * n * (n - 1))
        + tx2 * ty2 / (9.0 * n * (n - 1) * (n - 2))
    )
    z = s / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return CorrelationResult("kendall", tau, min(1.0, p), int(n))


def correlate(x: Sequence[float], y: Sequence[float], method: str, exact: bool = False) -> CorrelationResult:
    if method == "pearson":
        return pearson(x, y)
    if method == "spearman":
        return spearman(x, y, exact=exact)
    if method == "kendall":
        return kendall(x, y)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def normalize_scores(scores: Sequence[float], low: float = 0.0, high: float = 10.0) -> list[float]:
    """Affine map sending ``min(scores)`` to ``low`` and ``max(scores)`` to ``high``."""
    a = np.asarray(scores, dtype=float)
    if a.size == 0:
        raise ValueError("cannot normalize an empty score list")
    lo, hi = float(a.min()), float(a.max())
    if hi == lo:
        raise DegenerateSampleError("cannot normalize a constant score list")
    return (low + (a - lo) * (high - low) / (hi - lo)).tolist()


def filter_workers(worker_scores: Sequence[Sequence[float]], threshold: float = 0.65) -> list[int]:
    """Indices of annotators whose scores correlate with the panel mean.

    Each row is one annotator's scores over the same items; an annotator is
    kept when Pearson r against the column-wise mean is at least ``threshold``.
    Constant rows are dropped.
    """
    m = np.asarray(worker_scores, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError("worker_scores must be a 2-d (workers x items) array")
    mean = m.mean(axis=0)
    kept = []
    for i, row in enumerate(m):
        try:
            r = pearson(row, mean).coefficient
        except DegenerateSampleError:
            continue
        if r >= threshold:
            kept.append(i)
    return kept
