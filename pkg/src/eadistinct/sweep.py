"""Metric-versus-length sweeps and length-bias summaries.

A sweep scores ``trials`` independently sampled sets at every response length
and fits a least-squares line through each metric's per-length mean. Each
``(length, trial)`` cell is seeded from ``(base_seed, length, trial)`` alone,
so cells can run in any order or in parallel without changing the result.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from eadistinct.metrics import MetricReport, VocabSpec, ead
from eadistinct.samplers import (
    DEFAULT_SET_SIZE,
    CorpusPool,
    CorpusShortfallError,
    DesignatedSampler,
    seed_sequence,
)
from eadistinct.text import ResponseSet

DEFAULT_LENGTHS = (5, 10, 15, 20, 30, 40, 60, 80)
DEFAULT_TRIALS = 10
FLATNESS_EPS = 1e-12

DETAIL_HEADER = ("length", "trial", "n_distinct", "n_total", "distinct", "ead")
SUMMARY_HEADER = ("length", "mean_distinct", "sd_distinct", "mean_ead", "sd_ead")


class InsufficientDataError(ValueError):
    pass


class SweepShortfallError(ValueError):
    """Some lengths could not be sampled from the corpus.

    ``partial`` holds the sweep over the lengths that succeeded (or None).
    """

    def __init__(self, failures: list[CorpusShortfallError], partial: "SweepResult | None"):
        self.failures = failures
        self.failed_lengths = [f.length for f in failures]
        self.partial = partial
        detail = "; ".join(str(f) for f in failures)
        super().__init__(f"corpus shortfall at lengths {self.failed_lengths}: {detail}")


@dataclass(frozen=True)
class DesignatedSource:
    v: int = 30522
    rejection_policy: str = "resample"


@dataclass(frozen=True)
class CorpusSource:
    texts: tuple[str, ...]
    mode: str = "whitespace"
    length_match: str = "exact"
    name: str = "corpus"


@dataclass(frozen=True)
class SweepConfig:
    lengths: tuple[int, ...] = DEFAULT_LENGTHS
    set_size: int = DEFAULT_SET_SIZE
    trials: int = DEFAULT_TRIALS
    source: DesignatedSource | CorpusSource = field(default_factory=DesignatedSource)
    vocab: VocabSpec | None = None
    base_seed: int = 0
    n_order: int = 1

    def __post_init__(self):
        lengths = tuple(int(L) for L in self.lengths)
        if not lengths or any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError(f"lengths must be nonempty and strictly increasing, got {lengths}")
        if lengths[0] < 1:
            raise ValueError("lengths must be >= 1")
        if self.trials < 1 or self.set_size < 1:
            raise ValueError("trials and set_size must be >= 1")
        object.__setattr__(self, "lengths", lengths)

    @property
    def resolved_vocab(self) -> VocabSpec:
        if self.vocab is not None:
            return self.vocab
        if isinstance(self.source, DesignatedSource):
            return VocabSpec(self.source.v, "fixed", "designated source")
        return VocabSpec()


@dataclass(frozen=True)
class LengthSummary:
    length: int
    mean_distinct: float
    sd_distinct: float
    mean_ead: float
    sd_ead: float


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float


@dataclass
class SweepResult:
    config: SweepConfig
    reports: dict[tuple[int, int], MetricReport]
    summaries: list[LengthSummary]
    fit_distinct: LineFit | None
    fit_ead: LineFit | None

    def detail_rows(self) -> list[tuple]:
        return [
            (L, t, r.n_distinct, r.n_total, r.distinct, r.ead)
            for (L, t), r in sorted(self.reports.items())
        ]

    def detail_csv(self) -> str:
        return _to_csv(DETAIL_HEADER, self.detail_rows())

    def summary_csv(self) -> str:
        rows = [(s.length, s.mean_distinct, s.sd_distinct, s.mean_ead, s.sd_ead) for s in self.summaries]
        return _to_csv(SUMMARY_HEADER, rows)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _to_csv(header: Sequence[str], rows: Sequence[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def ols_fit(x: Sequence[float], y: Sequence[float]) -> LineFit:
    """Ordinary least-squares line through ``(x, y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise InsufficientDataError("line fit needs at least two paired points")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0:
        raise InsufficientDataError("line fit needs at least two distinct x values")
    slope = float(dx @ (y - y.mean())) / sxx
    return LineFit(slope, float(y.mean() - slope * x.mean()))


def _sample_cell(config: SweepConfig, pool: CorpusPool | None, length: int, trial: int) -> ResponseSet:
    seed = seed_sequence(config.base_seed, length, trial)
    src = config.source
    if isinstance(src, DesignatedSource):
        return DesignatedSampler(src.v, seed, src.rejection_policy).sample_set(length, config.set_size)
    return pool.sample(length, config.set_size, seed, src.length_match)


def _score_cell(args) -> MetricReport:
    config, pool, length, trial = args
    rs = _sample_cell(config, pool, length, trial)
    return ead(rs, config.n_order, config.resolved_vocab)


def iter_sampled_sets(config: SweepConfig):
    """Yield ``(length, trial, ResponseSet)`` for every cell, e.g. for auditing."""
    pool = _pool_for(config)
    for L in config.lengths:
        for t in range(config.trials):
            yield L, t, _sample_cell(config, pool, L, t)


def _pool_for(config: SweepConfig) -> CorpusPool | None:
    if isinstance(config.source, CorpusSource):
        return CorpusPool(config.source.texts, config.source.mode)
    return None


def _summarize(config: SweepConfig, reports: dict[tuple[int, int], MetricReport], lengths) -> SweepResult:
    summaries = []
    for L in lengths:
        d = np.array([reports[L, t].distinct for t in range(config.trials)])
        e = np.array([reports[L, t].ead for t in range(config.trials)])
        ddof = 1 if config.trials > 1 else 0
        summaries.append(LengthSummary(L, float(d.mean()), float(d.std(ddof=ddof)),
                                       float(e.mean()), float(e.std(ddof=ddof))))
    fit_d = fit_e = None
    if len(summaries) >= 2:
        xs = [s.length for s in summaries]
        fit_d = ols_fit(xs, [s.mean_distinct for s in summaries])
        fit_e = ols_fit(xs, [s.mean_ead for s in summaries])
    return SweepResult(config, reports, summaries, fit_d, fit_e)


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Score every ``(length, trial)`` cell of ``config``.

    Corpus sources are checked for availability up front; if any length falls
    short a :class:`SweepShortfallError` carrying the partial result over the
    remaining lengths is raised.
    """
    pool = _pool_for(config)
    lengths = list(config.lengths)
    failures: list[CorpusShortfallError] = []
    if pool is not None:
        for L in config.lengths:
            n_avail = len(pool.qualifying(L, config.source.length_match))
            if n_avail < config.set_size:
                failures.append(CorpusShortfallError(L, n_avail, config.set_size, config.source.length_match))
        lengths = [L for L in lengths if L not in {f.length for f in failures}]

    cells = [(L, t) for L in lengths for t in range(config.trials)]
    jobs = [(config, pool, L, t) for L, t in cells]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            scored = list(ex.map(_score_cell, jobs))
    else:
        scored = [_score_cell(j) for j in jobs]
    reports = dict(zip(cells, scored))

    if failures:
        partial = _summarize(config, reports, lengths) if lengths else None
        raise SweepShortfallError(failures, partial)
    return _summarize(config, reports, lengths)


def bias_summary(result: SweepResult) -> dict:
    """Slopes of mean Distinct and mean EAD against length, and their ratio.

    ``flatness_ratio = |slope_distinct| / max(|slope_ead|, 1e-12)``; large
    values mean EAD is much less length-sensitive than Distinct.
    """
    if len(result.summaries) < 3:
        raise InsufficientDataError(f"bias summary needs >= 3 lengths, sweep has {len(result.summaries)}")
    xs = [s.length for s in result.summaries]
    sd = ols_fit(xs, [s.mean_distinct for s in result.summaries]).slope
    se = ols_fit(xs, [s.mean_ead for s in result.summaries]).slope
    return {
        "slope_distinct": sd,
        "slope_ead": se,
        "flatness_ratio": abs(sd) / max(abs(se), FLATNESS_EPS),
    }


def write_sweep_outputs(result: SweepResult, out_dir: str | os.PathLike) -> dict[str, str]:
    """Write ``sweep_detail.csv``, ``sweep_summary.csv`` and, with >= 3 lengths, ``bias_summary.json``."""
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "detail": os.path.join(out_dir, "sweep_detail.csv"),
        "summary": os.path.join(out_dir, "sweep_summary.csv"),
    }
    with open(paths["detail"], "w", encoding="utf-8", newline="") as fh:
        fh.write(result.detail_csv())
    with open(paths["summary"], "w", encoding="utf-8", newline="") as fh:
        fh.write(result.summary_csv())
    if len(result.summaries) >= 3:
        paths["bias"] = os.path.join(out_dir, "bias_summary.json")
        bias = bias_summary(result)
        with open(paths["bias"], "w", encoding="utf-8") as fh:
            json.dump({k: (None if math.isnan(v) else v) for k, v in bias.items()}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return paths
