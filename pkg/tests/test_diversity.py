"""Subsampled diversity and box plot statistics tests."""

from __future__ import annotations

import random
from datetime import timedelta

import pytest

import oracles
from conftest import BASE, make_tweet
from synth import uniform_hashtag_corpus
from textdiverge.corpus import CorpusWindow, filter_window
from textdiverge.diversity import (
    DiversitySampleSet,
    InsufficientDataError,
    boxplot_stats,
    compare_diversity,
    derive_seed,
    subsample_diversity,
)

MONTH = timedelta(days=30)


def window_of(texts: list[str], anchor: str = "a") -> CorpusWindow:
    tweets = tuple(
        make_tweet(f"{anchor}{i}", minute=i, text=f"{text} #{anchor}")
        for i, text in enumerate(texts)
    )
    return CorpusWindow(anchor=anchor, start=BASE, end=BASE + MONTH, tweets=tweets)


def uniform_window(anchor: str, n_tags: int, n_tweets: int, seed: int) -> CorpusWindow:
    tweets = uniform_hashtag_corpus(anchor, n_tags, n_tweets, seed, start=BASE)
    return filter_window(tweets, BASE, BASE + MONTH, anchor)


class TestDeriveSeed:
    def test_stable_across_calls_and_sessions(self):
        assert derive_seed(42, "x") == derive_seed(42, "x")
        # frozen: sha256 is platform-independent, so this value never drifts
        assert derive_seed(0, "probe") == 5019295758086775208

    def test_distinct_parts_distinct_seeds(self):
        assert derive_seed(42, "a") != derive_seed(42, "b")
        assert derive_seed(1, "a") != derive_seed(2, "a")


class TestSubsampleDiversity:
    def test_window_of_exactly_sample_size_has_zero_variance(self):
        win = window_of(["alpha beta", "beta gamma", "gamma delta", "delta alpha"])
        result = subsample_diversity(win, "lexical", sample_size=4, n_draws=10, seed=1)
        assert len(set(result.samples)) == 1

    def test_same_seed_reproduces_samples(self):
        win = uniform_window("a", 8, 300, seed=5)
        first = subsample_diversity(win, "hashtag", 100, 25, seed=9)
        second = subsample_diversity(win, "hashtag", 100, 25, seed=9)
        assert first.samples == second.samples
        other = subsample_diversity(win, "hashtag", 100, 25, seed=10)
        assert other.samples != first.samples

    def test_uniform_hashtags_approach_tag_count(self):
        win = uniform_window("a", 8, 3000, seed=7)
        result = subsample_diversity(win, "hashtag", sample_size=1000, n_draws=30, seed=3)
        assert result.mean == pytest.approx(8.0, rel=0.05)

    def test_insufficient_window_errors_with_counts(self):
        win = window_of(["alpha"] * 3)
        with pytest.raises(InsufficientDataError, match="3 tweets"):
            subsample_diversity(win, "lexical", sample_size=5, n_draws=2, seed=1)

    def test_with_replacement_allows_small_windows(self):
        win = window_of(["alpha beta"] * 3)
        result = subsample_diversity(
            win, "lexical", sample_size=10, n_draws=4, seed=2, with_replacement=True
        )
        assert len(result.samples) == 4

    def test_lexical_pool_ignores_hashtag_tokens(self):
        base_texts = ["alpha beta #extra", "gamma delta #more"]
        win = window_of(base_texts)
        augmented = window_of(base_texts + ["#only #tags"])
        base_set = subsample_diversity(win, "lexical", sample_size=2, n_draws=5, seed=4)
        # sampling the whole window each time makes the draws deterministic,
        # so adding hashtag-only tweets cannot change lexical diversity
        augmented_set = subsample_diversity(augmented, "lexical", sample_size=3, n_draws=5, seed=4)
        assert base_set.samples == augmented_set.samples

    def test_hashtag_pool_excludes_own_anchor_keeps_others(self):
        win = window_of(["#other #topic1", "#other #topic2"])
        result = subsample_diversity(win, "hashtag", sample_size=2, n_draws=1, seed=1)
        # pool = {other: 2, topic1: 1, topic2: 1}; anchor "a" itself excluded.
        # H = -(0.5 log2 0.5 + 2 * 0.25 log2 0.25) = 1.5 bits exactly
        assert result.samples[0] == pytest.approx(2.0 ** 1.5, abs=1e-12)

    def test_exclude_hashtags_option(self):
        win = window_of(["#other #topic1", "#other #topic2"])
        result = subsample_diversity(
            win, "hashtag", sample_size=2, n_draws=1, seed=1, exclude_hashtags={"other"}
        )
        assert result.samples[0] == pytest.approx(2.0, abs=1e-12)

    def test_empty_pool_draws_floor_at_one(self):
        win = window_of(["#justtags"])
        result = subsample_diversity(win, "lexical", sample_size=1, n_draws=3, seed=1)
        assert result.samples == (1.0, 1.0, 1.0)

    def test_plugin_consistency_improves_with_sample_size(self):
        win = uniform_window("a", 6, 4000, seed=13)
        small = subsample_diversity(win, "hashtag", sample_size=100, n_draws=40, seed=5)
        large = subsample_diversity(win, "hashtag", sample_size=1000, n_draws=40, seed=5)
        assert small.mean == pytest.approx(6.0, rel=0.05)
        assert large.mean == pytest.approx(6.0, rel=0.05)
        assert abs(large.mean - 6.0) <= abs(small.mean - 6.0)

    def test_sample_set_invariants(self):
        with pytest.raises(ValueError):
            DiversitySampleSet("a", (BASE, BASE + MONTH), "nope", (1.0,), 1, 1, 0)
        with pytest.raises(ValueError):
            DiversitySampleSet("a", (BASE, BASE + MONTH), "lexical", (0.5,), 1, 1, 0)
        with pytest.raises(ValueError):
            DiversitySampleSet("a", (BASE, BASE + MONTH), "lexical", (1.0, 1.0), 1, 1, 0)


class TestBoxplotStats:
    def test_constant_samples(self):
        stats = boxplot_stats([3.0] * 10)
        assert stats.median == stats.q1 == stats.q3 == 3.0
        assert stats.notch_lo == stats.notch_hi == 3.0
        assert stats.outliers == ()
        assert stats.whisker_lo == stats.whisker_hi == 3.0

    def test_one_to_hundred_quartiles(self):
        values = [float(v) for v in range(1, 101)]
        stats = boxplot_stats(values)
        assert stats.median == pytest.approx(oracles.quantile_linear(values, 0.5))
        assert stats.q1 == pytest.approx(oracles.quantile_linear(values, 0.25))
        assert stats.q3 == pytest.approx(oracles.quantile_linear(values, 0.75))
        assert (stats.median, stats.q1, stats.q3) == (50.5, 25.75, 75.25)

    def test_extreme_point_becomes_outlier(self):
        values = [10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 40.0]
        stats = boxplot_stats(values)
        assert stats.outliers == (40.0,)
        assert stats.whisker_hi == 15.0

    def test_requires_five_samples(self):
        with pytest.raises(ValueError):
            boxplot_stats([1.0, 2.0, 3.0, 4.0])

    def test_permutation_invariant(self):
        rng = random.Random(31)
        values = [rng.uniform(1, 50) for _ in range(40)]
        shuffled = values[:]
        rng.shuffle(shuffled)
        assert boxplot_stats(values) == boxplot_stats(shuffled)

    def test_notch_contains_median(self):
        rng = random.Random(37)
        values = [rng.gauss(10, 2) + 12 for _ in range(200)]
        stats = boxplot_stats(values)
        assert stats.notch_lo <= stats.median <= stats.notch_hi
        assert stats.q1 <= stats.median <= stats.q3


class TestCompareDiversity:
    def _set(self, samples: list[float], kind: str = "hashtag", anchor: str = "a") -> DiversitySampleSet:
        return DiversitySampleSet(
            anchor=anchor,
            period=(BASE, BASE + MONTH),
            kind=kind,
            samples=tuple(samples),
            sample_size=10,
            n_draws=len(samples),
            seed=0,
        )

    def test_identical_sets(self):
        samples = [4.0, 4.1, 3.9, 4.05, 3.95, 4.0]
        comparison = compare_diversity(self._set(samples), self._set(samples, anchor="b"))
        assert comparison.mean_ratio == pytest.approx(1.0)
        assert not comparison.notches_disjoint

    def test_four_to_one_ratio_from_uniform_corpora(self):
        win_a = uniform_window("a", 8, 1500, seed=3)
        win_b = uniform_window("b", 2, 1500, seed=4)
        set_a = subsample_diversity(win_a, "hashtag", 500, 50, seed=21)
        set_b = subsample_diversity(win_b, "hashtag", 500, 50, seed=22)
        comparison = compare_diversity(set_a, set_b)
        assert comparison.mean_ratio == pytest.approx(4.0, rel=0.05)
        assert comparison.notches_disjoint

    def test_disjoint_notches_flagged(self):
        low = self._set([2.0 + 0.01 * i for i in range(10)])
        high = self._set([5.0 + 0.01 * i for i in range(10)], anchor="b")
        assert compare_diversity(high, low).notches_disjoint

    def test_kind_and_period_mismatch(self):
        a = self._set([2.0] * 6)
        with pytest.raises(ValueError, match="kind"):
            compare_diversity(a, self._set([2.0] * 6, kind="lexical"))
        other_period = DiversitySampleSet(
            anchor="b",
            period=(BASE + MONTH, BASE + 2 * MONTH),
            kind="hashtag",
            samples=(2.0,) * 6,
            sample_size=10,
            n_draws=6,
            seed=0,
        )
        with pytest.raises(ValueError, match="period"):
            compare_diversity(a, other_period)
