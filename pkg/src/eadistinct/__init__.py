"""Distinct-n and expectation-adjusted Distinct (EAD) diversity scores."""

from eadistinct.metrics import (
    DEFAULT_VOCAB_SIZE,
    EmptyInputError,
    MetricReport,
    VocabMismatchWarning,
    VocabSpec,
    distinct,
    ead,
    expected_distinct_exact_iid,
    expected_distinct_upper,
)
from eadistinct.samplers import (
    CorpusShortfallError,
    DesignatedSampler,
    designated_pmf,
    sample_corpus_set,
    sample_designated_set,
)
from eadistinct.stats import (
    CorrelationResult,
    DegenerateSampleError,
    filter_workers,
    kendall,
    normalize_scores,
    pearson,
    spearman,
)
from eadistinct.sweep import SweepConfig, SweepResult, bias_summary, run_sweep
from eadistinct.text import ResponseSet, count_vocab, ngrams, tokenize

__version__ = "0.1.0"
