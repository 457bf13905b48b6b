import itertools
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eadistinct.metrics import (
    EmptyInputError,
    MetricReport,
    VocabMismatchWarning,
    VocabSpec,
    distinct,
    ead,
    ead_from_counts,
    expected_distinct_exact_iid,
    expected_distinct_upper,
)
from eadistinct.text import ResponseSet

# frozen from 40-digit mpmath evaluation of V * (1 - ((V-1)/V)**C)
DENOM_5_5 = 3.3616
DENOM_5_10 = 4.463129088
DENOM_50_200 = 49.120602669713921753
DENOM_30522_10000 = 8527.1168890419689277


def mp_denom(v, c):
    with mpmath.workdps(50):
        return float(v * (1 - (mpmath.mpf(v - 1) / v) ** c))


def mc_distinct(v, c, trials, seed):
    rng = np.random.default_rng(seed)
    draws = np.sort(rng.integers(0, v, size=(trials, c)), axis=1)
    return float((1 + np.count_nonzero(np.diff(draws, axis=1), axis=1)).mean())


def test_distinct_examples():
    assert distinct(ResponseSet([("a", "b", "a", "c")])) == (3, 4, 0.75)
    assert distinct(ResponseSet([("a", "a", "a")]))[2] == pytest.approx(1 / 3)
    n, c, s = distinct(ResponseSet([("a", "b", "a", "b")]), 2)
    assert (n, c) == (2, 3) and s == pytest.approx(2 / 3)


def test_distinct_empty_errors_are_distinguished():
    with pytest.raises(EmptyInputError, match="no responses"):
        distinct(ResponseSet([]))
    with pytest.raises(EmptyInputError, match="shorter than"):
        distinct(ResponseSet([("a",), ("b",)]), 2)
    with pytest.raises(EmptyInputError):
        ead(ResponseSet([()]), 1, VocabSpec(5))


def test_upper_examples():
    assert expected_distinct_upper(5, 1) == 1.0
    assert expected_distinct_upper(5, 5) == pytest.approx(DENOM_5_5, rel=1e-14)
    assert expected_distinct_upper(5, 0) == 0.0
    assert expected_distinct_upper(30522, 10**12) == pytest.approx(30522, rel=1e-6)
    with pytest.raises(ValueError):
        expected_distinct_upper(0, 3)


@pytest.mark.parametrize("v", [1, 2, 5, 30522, 61044, 10**7])
def test_upper_is_exactly_one_at_one_token(v):
    assert expected_distinct_upper(v, 1) == 1.0


@pytest.mark.parametrize("v,c", [(5, 10), (50, 200), (30522, 10000), (30522, 160000), (30522, 10**9), (7, 3)])
def test_upper_matches_arbitrary_precision(v, c):
    assert expected_distinct_upper(v, c) == pytest.approx(mp_denom(v, c), rel=1e-12)


def test_upper_frozen_values():
    assert expected_distinct_upper(5, 10) == pytest.approx(DENOM_5_10, rel=1e-13)
    assert expected_distinct_upper(50, 200) == pytest.approx(DENOM_50_200, rel=1e-13)
    assert expected_distinct_upper(30522, 10000) == pytest.approx(DENOM_30522_10000, rel=1e-12)


def test_upper_vectorized():
    cs = np.array([0, 1, 5])
    np.testing.assert_allclose(expected_distinct_upper(5, cs), [0, 1, DENOM_5_5])


def test_upper_strictly_increasing_and_bounded():
    cs = np.arange(1, 5000)
    d = expected_distinct_upper(30522, cs)
    assert np.all(np.diff(d) > 0)
    assert np.all(d[1:] < np.minimum(cs[1:], 30522))


@pytest.mark.parametrize("v,c", [(5, 5), (50, 200)])
def test_upper_monte_carlo(v, c):
    est = mc_distinct(v, c, 100_000, seed=v * 1000 + c)
    assert est == pytest.approx(expected_distinct_upper(v, c), rel=0.01)


def test_upper_exhaustive_enumeration_small():
    for v, c in [(3, 4), (5, 5), (4, 2)]:
        total = sum(len(set(s)) for s in itertools.product(range(v), repeat=c))
        assert expected_distinct_upper(v, c) == pytest.approx(total / v**c, rel=1e-13)


def test_ead_examples():
    r = ead(ResponseSet([("x",)]), 1, VocabSpec(123))
    assert r.ead == 1.0
    assert ead_from_counts(3, 5, 5) == pytest.approx(0.8924321751546882, rel=1e-13)
    with pytest.raises(EmptyInputError):
        ead_from_counts(0, 0, 5)


def test_ead_report_fields():
    r = ead(ResponseSet([("a", "b", "a", "c")]), 1, VocabSpec(5))
    assert isinstance(r, MetricReport)
    assert (r.n_distinct, r.n_total, r.distinct) == (3, 4, 0.75)
    assert r.ead == pytest.approx(3 / 2.952, rel=1e-13)
    d = r.to_dict()
    assert set(d) == {"n_order", "n_distinct", "n_total", "vocab_size", "vocab_source", "distinct", "ead"}
    assert d["vocab_size"] == 5 and d["vocab_source"] == "fixed"


def test_ead_not_clamped_and_warns_when_n_exceeds_v():
    rs = ResponseSet([("a", "b", "c", "d")])
    with pytest.warns(VocabMismatchWarning, match="exceed"):
        r = ead(rs, 1, VocabSpec(2))
    assert r.ead > 1


def test_ead_higher_order_warns_without_ngram_vocab():
    rs = ResponseSet([("a", "b", "c")])
    with pytest.warns(VocabMismatchWarning, match="token-level"):
        ead(rs, 2, VocabSpec(100))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        r = ead(rs, 2, VocabSpec(100, "ngram-derived"))
    assert r.ead == pytest.approx(2 / expected_distinct_upper(100, 2))


def test_ead_accepts_int_vocab_and_default():
    rs = ResponseSet([("a", "b")])
    assert ead(rs, 1, 5).vocab == VocabSpec(5)
    assert ead(rs).vocab.size == 30522


def test_vocab_spec_validation():
    with pytest.raises(ValueError):
        VocabSpec(0)
    with pytest.raises(ValueError):
        VocabSpec(5, "guessed")


def test_exact_iid_examples():
    assert expected_distinct_exact_iid([0.2] * 5, [5]) == pytest.approx(DENOM_5_5, rel=1e-13)
    assert expected_distinct_exact_iid([1, 0, 0, 0], [3, 2]) == 1.0
    assert expected_distinct_exact_iid([0.5, 0.5], [2]) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        expected_distinct_exact_iid([0.5, 0.4], [2])
    with pytest.raises(ValueError):
        expected_distinct_exact_iid([1.5, -0.5], [2])


def test_exact_iid_enumeration_nonuniform():
    p = [0.5, 0.3, 0.2]
    lengths = [2, 1]
    expected = 0.0
    for seq in itertools.product(range(3), repeat=3):
        prob = np.prod([p[s] for s in seq])
        expected += prob * len(set(seq))
    assert expected_distinct_exact_iid(p, lengths) == pytest.approx(expected, rel=1e-13)


@given(st.integers(1, 500), st.lists(st.integers(0, 50), min_size=1, max_size=5))
def test_exact_iid_uniform_equals_upper(v, lengths):
    assert expected_distinct_exact_iid(np.full(v, 1 / v), lengths) == pytest.approx(
        expected_distinct_upper(v, sum(lengths)), rel=1e-9, abs=1e-12)


@given(st.integers(0, 1000), st.integers(1, 10**6), st.integers(2, 10**5))
def test_ead_increment_in_n_is_reciprocal_denominator(n, c, v):
    step = ead_from_counts(n + 1, c, v) - ead_from_counts(n, c, v)
    assert step == pytest.approx(1 / expected_distinct_upper(v, c), rel=1e-9)


def test_ead_converges_to_n_over_v():
    v, n = 30522, 12000
    vals = [ead_from_counts(n, c, v) for c in (10**3, 10**6, 10**9)]
    assert vals[0] > vals[1] >= vals[2]
    assert vals[2] == pytest.approx(n / v, rel=1e-3)


def test_denominator_over_v_tends_to_one_monotonically():
    ratios = expected_distinct_upper(30522, np.array([10, 10**3, 10**5, 10**7])) / 30522
    assert np.all(np.diff(ratios) > 0)
    assert ratios[-1] == pytest.approx(1.0, abs=1e-12)


def test_vocab_insensitivity_small_counts():
    cs = np.arange(1, 101)
    a = expected_distinct_upper(30522, cs)
    b = expected_distinct_upper(61044, cs)
    rel = np.abs(a - b) / a
    assert rel.max() < 1e-3
    np.testing.assert_allclose(rel[1:], (cs[1:] - 1) / (2 * 61044), rtol=0.01)


@given(st.lists(st.lists(st.sampled_from("abcdef"), max_size=6), min_size=1, max_size=6), st.randoms())
def test_permutation_invariance(responses, rnd):
    if not any(responses):
        return
    base = ead(ResponseSet(responses), 1, VocabSpec(50))
    shuffled = [list(r) for r in responses]
    rnd.shuffle(shuffled)
    for r in shuffled:
        rnd.shuffle(r)
    assert ead(ResponseSet(shuffled), 1, VocabSpec(50)) == base
    # bigram scores survive response reordering only
    reordered = list(responses)
    rnd.shuffle(reordered)
    if any(len(r) >= 2 for r in responses):
        v = VocabSpec(50, "ngram-derived")
        assert ead(ResponseSet(reordered), 2, v) == ead(ResponseSet(responses), 2, v)


@given(st.lists(st.lists(st.integers(0, 30), min_size=1, max_size=8), min_size=1, max_size=8))
def test_report_invariants(responses):
    r = ead(ResponseSet(responses), 1, VocabSpec(31))
    assert 0 < r.n_distinct <= min(r.n_total, 31)
    assert r.distinct == r.n_distinct / r.n_total
    assert r.ead > 0
