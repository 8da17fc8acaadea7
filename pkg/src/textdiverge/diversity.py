"""Volume-controlled diversity comparisons.

Draws fixed-size subsamples of tweets from a corpus window, computes the
effective lexical or hashtag diversity of each draw, and summarizes the
resulting distributions as notched box plots. Sampling is reproducible:
every draw derives its own stream from (seed, draw index), so parallel and
sequential execution yield the same samples.
"""

from __future__ import annotations

import csv
import hashlib
import io
import random
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

import numpy as np

from .corpus import (
    CorpusWindow,
    StopList,
    TokenBag,
    build_distribution,
    extract_hashtags,
    format_instant,
    tokenize,
)
from .infotheory import effective_diversity, shannon_entropy

KINDS = ("lexical", "hashtag")


class InsufficientDataError(ValueError):
    """A window holds fewer tweets than one subsample requires."""


def derive_seed(seed: int, *parts: object) -> int:
    """Stable sub-seed from a root seed and a label tuple (hash-based, not salted)."""
    text = "|".join([str(seed), *(str(part) for part in parts)])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class DiversitySampleSet:
    anchor: str
    period: tuple[datetime, datetime]
    kind: str  # "lexical" or "hashtag"
    samples: tuple[float, ...]
    sample_size: int
    n_draws: int
    seed: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if len(self.samples) != self.n_draws:
            raise ValueError("sample count does not match n_draws")
        if any(s < 1.0 for s in self.samples):
            raise ValueError("effective diversity cannot fall below 1")

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))


@dataclass(frozen=True)
class BoxplotStats:
    median: float
    q1: float
    q3: float
    notch_lo: float
    notch_hi: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]


@dataclass(frozen=True)
class DiversityComparison:
    anchor_a: str
    anchor_b: str
    kind: str
    period: tuple[datetime, datetime]
    mean_a: float
    mean_b: float
    mean_ratio: float  # mean_a / mean_b
    notches_disjoint: bool  # the visual 95% significance criterion


def _pooled_diversity(pool: Counter[str]) -> float:
    # an empty draw carries zero information: H = 0, so diversity 1
    if not pool:
        return 1.0
    return effective_diversity(shannon_entropy(build_distribution(TokenBag(dict(pool)))))


def subsample_diversity(
    window: CorpusWindow,
    kind: str,
    sample_size: int,
    n_draws: int,
    seed: int,
    stoplist: StopList | None = None,
    with_replacement: bool = False,
    lexical_exclude_all_hashtags: bool = True,
    exclude_hashtags: Iterable[str] = (),
) -> DiversitySampleSet:
    """Effective-diversity distribution over repeated fixed-size subsamples.

    kind "lexical" pools word tokens (by default dropping every hashtag
    token); kind "hashtag" pools hashtag occurrences minus the window's own
    anchor (plus any extra tags in exclude_hashtags). Draws are without
    replacement unless with_replacement is set.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if sample_size < 1 or n_draws < 1:
        raise ValueError("sample_size and n_draws must be positive")
    population = len(window.tweets)
    if population < sample_size and not with_replacement:
        raise InsufficientDataError(
            f"window #{window.anchor} [{format_instant(window.start)}, "
            f"{format_instant(window.end)}) holds {population} tweets; "
            f"{sample_size} are required per draw"
        )

    if kind == "lexical":
        per_tweet: list[list[str]] = []
        for tweet in window.tweets:
            tokens = tokenize(tweet.text, anchors={window.anchor}, stoplist=stoplist)
            if lexical_exclude_all_hashtags:
                tokens = [tok for tok in tokens if not tok.startswith("#")]
            per_tweet.append(tokens)
    else:
        excluded = {window.anchor, *exclude_hashtags}
        per_tweet = [
            [tag for tag in extract_hashtags(tweet.text) if tag not in excluded]
            for tweet in window.tweets
        ]

    samples = []
    indices = range(population)
    for draw in range(n_draws):
        rng = random.Random(derive_seed(seed, draw))
        if with_replacement:
            chosen = rng.choices(indices, k=sample_size)
        else:
            chosen = rng.sample(indices, sample_size)
        pool: Counter[str] = Counter()
        for i in chosen:
            pool.update(per_tweet[i])
        samples.append(_pooled_diversity(pool))

    return DiversitySampleSet(
        anchor=window.anchor,
        period=(window.start, window.end),
        kind=kind,
        samples=tuple(samples),
        sample_size=sample_size,
        n_draws=n_draws,
        seed=seed,
    )


def boxplot_stats(samples: Sequence[float]) -> BoxplotStats:
    """Notched box plot summary: linear-interpolation quartiles, McGill notches,
    whiskers at the most extreme points within 1.5*IQR of the box."""
    if len(samples) < 5:
        raise ValueError(f"need at least 5 samples, got {len(samples)}")
    data = np.asarray(samples, dtype=np.float64)
    q1, median, q3 = (float(v) for v in np.percentile(data, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    half_notch = 1.57 * iqr / len(data) ** 0.5
    lo_bound = q1 - 1.5 * iqr
    hi_bound = q3 + 1.5 * iqr
    inside = data[(data >= lo_bound) & (data <= hi_bound)]
    outliers = tuple(sorted(float(v) for v in data[(data < lo_bound) | (data > hi_bound)]))
    return BoxplotStats(
        median=median,
        q1=q1,
        q3=q3,
        notch_lo=median - half_notch,
        notch_hi=median + half_notch,
        whisker_lo=float(inside.min()),
        whisker_hi=float(inside.max()),
        outliers=outliers,
    )


def compare_diversity(set_a: DiversitySampleSet, set_b: DiversitySampleSet) -> DiversityComparison:
    """Mean diversity ratio plus the notch-disjointness significance flag."""
    if set_a.kind != set_b.kind:
        raise ValueError(f"kind mismatch: {set_a.kind} vs {set_b.kind}")
    if set_a.period != set_b.period:
        raise ValueError("period mismatch between sample sets")
    stats_a = boxplot_stats(set_a.samples)
    stats_b = boxplot_stats(set_b.samples)
    disjoint = stats_a.notch_hi < stats_b.notch_lo or stats_b.notch_hi < stats_a.notch_lo
    return DiversityComparison(
        anchor_a=set_a.anchor,
        anchor_b=set_b.anchor,
        kind=set_a.kind,
        period=set_a.period,
        mean_a=set_a.mean,
        mean_b=set_b.mean,
        mean_ratio=set_a.mean / set_b.mean,
        notches_disjoint=disjoint,
    )


def samples_csv(sample_set: DiversitySampleSet) -> str:
    """Per-draw CSV: `draw_index,effective_diversity`."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["draw_index", "effective_diversity"])
    for draw, value in enumerate(sample_set.samples):
        writer.writerow([draw, repr(value)])
    return buffer.getvalue()


def boxplot_summary_csv(rows: list[tuple[DiversitySampleSet, BoxplotStats]]) -> str:
    """One row per (anchor, period, kind) with the full box plot summary."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "anchor",
            "period_start",
            "period_end",
            "kind",
            "median",
            "q1",
            "q3",
            "notch_lo",
            "notch_hi",
            "whisker_lo",
            "whisker_hi",
            "outliers",
        ]
    )
    for sample_set, stats in rows:
        writer.writerow(
            [
                sample_set.anchor,
                format_instant(sample_set.period[0]),
                format_instant(sample_set.period[1]),
                sample_set.kind,
                repr(stats.median),
                repr(stats.q1),
                repr(stats.q3),
                repr(stats.notch_lo),
                repr(stats.notch_hi),
                repr(stats.whisker_lo),
                repr(stats.whisker_hi),
                ";".join(repr(v) for v in stats.outliers),
            ]
        )
    return buffer.getvalue()
