"""Word shift reports.

Builds ranked per-word divergence reports between two anchor corpora:
tokenizes both sides, computes the Jensen-Shannon divergence and its
per-word contributions, attaches the context diversity of each reported
word, and flags words whose contribution is driven by popular retweets.
Reports serialize to JSON and render to self-contained SVG bar charts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from xml.sax.saxutils import escape

from .corpus import (
    CorpusWindow,
    EmptyCorpusError,
    StopList,
    TokenBag,
    build_distribution,
    format_instant,
    parse_instant,
    tokenize,
)
from .infotheory import (
    Direction,
    JsdWeights,
    jsd,
    jsd_contributions,
    word_context_diversity,
)

WEIGHT_MODES = ("token_counts", "tweet_counts")


@dataclass(frozen=True)
class ShiftConfig:
    """Tunable knobs for report construction."""

    top_k: int | None = 50  # None keeps every entry
    diversity_threshold_bits: float = 3.0
    weight_mode: str = "token_counts"
    min_occurrences: int = 1  # entries below this combined count are not reported
    dominant_tweet_share: float = 0.5  # advisory marker threshold

    def __post_init__(self) -> None:
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError("top_k must be positive or None")
        if self.min_occurrences < 1:
            raise ValueError("min_occurrences must be at least 1")


@dataclass(frozen=True)
class ShiftEntry:
    token: str
    percent: float  # share of the total divergence, in [0, 100]
    direction: Direction  # CORPUS_P or CORPUS_Q, never ZERO
    diversity_p: float | None  # bits; None when the token never occurs in P
    diversity_q: float | None
    retweet_driven: bool
    single_tweet_dominant: bool  # advisory: one tweet text covers >50% of uses


@dataclass(frozen=True)
class WordShiftReport:
    anchor_a: str
    anchor_b: str
    window_start: datetime
    window_end: datetime
    total_jsd: float  # bits
    weights: JsdWeights
    entries: tuple[ShiftEntry, ...]


def _dominant_share(tokenized: list[list[str]], token: str) -> float:
    """Largest share of the token's occurrences attributable to one tweet text."""
    per_text: dict[tuple[str, ...], int] = {}
    total = 0
    for tokens in tokenized:
        count = tokens.count(token)
        if count:
            key = tuple(tokens)
            per_text[key] = per_text.get(key, 0) + count
            total += count
    if total == 0:
        return 0.0
    return max(per_text.values()) / total


def build_word_shift(
    corpus_p: CorpusWindow,
    corpus_q: CorpusWindow,
    stoplist: StopList | None = None,
    config: ShiftConfig | None = None,
) -> WordShiftReport:
    """Construct the ranked word shift report for two corpora of one window."""
    cfg = config or ShiftConfig()
    if (corpus_p.start, corpus_p.end) != (corpus_q.start, corpus_q.end):
        raise ValueError("the two corpora must cover the same time window")
    anchors = {corpus_p.anchor, corpus_q.anchor}
    tokenized_p = [tokenize(t.text, anchors, stoplist) for t in corpus_p.tweets]
    tokenized_q = [tokenize(t.text, anchors, stoplist) for t in corpus_q.tweets]
    bag_p = TokenBag.from_tokens(tok for tweet in tokenized_p for tok in tweet)
    bag_q = TokenBag.from_tokens(tok for tweet in tokenized_q for tok in tweet)
    if not bag_p.counts:
        raise EmptyCorpusError(f"corpus_p (#{corpus_p.anchor}) has no tokens after tokenization")
    if not bag_q.counts:
        raise EmptyCorpusError(f"corpus_q (#{corpus_q.anchor}) has no tokens after tokenization")

    if cfg.weight_mode == "token_counts":
        weights = JsdWeights.from_sizes(bag_p.total, bag_q.total)
    else:
        weights = JsdWeights.from_sizes(len(corpus_p.tweets), len(corpus_q.tweets))

    dist_p = build_distribution(bag_p)
    dist_q = build_distribution(bag_q)
    total, _ = jsd(dist_p, dist_q, weights)
    contributions = jsd_contributions(dist_p, dist_q, weights)

    ranked = sorted(
        (c for c in contributions if c.direction is not Direction.ZERO and c.contribution > 0.0),
        key=lambda c: (-c.contribution, c.token),
    )
    if cfg.min_occurrences > 1:
        ranked = [
            c
            for c in ranked
            if bag_p.counts.get(c.token, 0) + bag_q.counts.get(c.token, 0) >= cfg.min_occurrences
        ]
    if cfg.top_k is not None:
        ranked = ranked[: cfg.top_k]

    index_p: dict[str, list[int]] = {}
    for i, tokens in enumerate(tokenized_p):
        for tok in set(tokens):
            index_p.setdefault(tok, []).append(i)
    index_q: dict[str, list[int]] = {}
    for i, tokens in enumerate(tokenized_q):
        for tok in set(tokens):
            index_q.setdefault(tok, []).append(i)

    entries = []
    for contrib in ranked:
        token = contrib.token
        tweets_p = [tokenized_p[i] for i in index_p.get(token, [])]
        tweets_q = [tokenized_q[i] for i in index_q.get(token, [])]
        diversity_p = word_context_diversity(tweets_p, token, anchors) if tweets_p else None
        diversity_q = word_context_diversity(tweets_q, token, anchors) if tweets_q else None
        if contrib.direction is Direction.CORPUS_P:
            side_diversity = diversity_p
            side_tweets = tweets_p
        else:
            side_diversity = diversity_q
            side_tweets = tweets_q
        assert side_diversity is not None  # the direction side always holds the token
        entries.append(
            ShiftEntry(
                token=token,
                percent=100.0 * contrib.contribution / total,
                direction=contrib.direction,
                diversity_p=diversity_p,
                diversity_q=diversity_q,
                retweet_driven=side_diversity < cfg.diversity_threshold_bits,
                single_tweet_dominant=_dominant_share(side_tweets, token) > cfg.dominant_tweet_share,
            )
        )

    return WordShiftReport(
        anchor_a=corpus_p.anchor,
        anchor_b=corpus_q.anchor,
        window_start=corpus_p.start,
        window_end=corpus_p.end,
        total_jsd=total,
        weights=weights,
        entries=tuple(entries),
    )


def export_word_shift_json(report: WordShiftReport) -> bytes:
    """Serialize a report deterministically: stable key order, stable entry order."""
    payload = {
        "anchor_a": report.anchor_a,
        "anchor_b": report.anchor_b,
        "window_start": format_instant(report.window_start),
        "window_end": format_instant(report.window_end),
        "total_jsd_bits": report.total_jsd,
        "weights": {"pi_p": report.weights.pi_p, "pi_q": report.weights.pi_q},
        "entries": [
            {
                "token": e.token,
                "percent": e.percent,
                "direction": e.direction.value,
                "diversity_p_bits": e.diversity_p,
                "diversity_q_bits": e.diversity_q,
                "retweet_driven": e.retweet_driven,
                "single_tweet_dominant": e.single_tweet_dominant,
            }
            for e in report.entries
        ],
    }
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def import_word_shift_json(data: bytes) -> WordShiftReport:
    payload = json.loads(data.decode("utf-8"))
    entries = tuple(
        ShiftEntry(
            token=e["token"],
            percent=e["percent"],
            direction=Direction(e["direction"]),
            diversity_p=e["diversity_p_bits"],
            diversity_q=e["diversity_q_bits"],
            retweet_driven=e["retweet_driven"],
            single_tweet_dominant=e["single_tweet_dominant"],
        )
        for e in payload["entries"]
    )
    return WordShiftReport(
        anchor_a=payload["anchor_a"],
        anchor_b=payload["anchor_b"],
        window_start=parse_instant(payload["window_start"]),
        window_end=parse_instant(payload["window_end"]),
        total_jsd=payload["total_jsd_bits"],
        weights=JsdWeights(payload["weights"]["pi_p"], payload["weights"]["pi_q"]),
        entries=entries,
    )


@dataclass(frozen=True)
class SvgStyle:
    width: int = 860
    bar_height: int = 16
    bar_gap: int = 6
    margin_top: int = 56
    margin_bottom: int = 46
    margin_side: int = 150
    font_family: str = "sans-serif"
    font_size: int = 12
    left_direction: Direction = Direction.CORPUS_P  # which side's bars point left
    hue_p: int = 214  # blue
    hue_q: int = 24  # orange
    lightness_lo: float = 30.0  # highest diversity
    lightness_hi: float = 88.0  # lowest diversity


def _bar_fill(style: SvgStyle, direction: Direction, diversity: float, max_diversity: float) -> str:
    hue = style.hue_p if direction is Direction.CORPUS_P else style.hue_q
    scale = diversity / max_diversity if max_diversity > 0.0 else 0.0
    lightness = style.lightness_hi - (style.lightness_hi - style.lightness_lo) * scale
    return f"hsl({hue}, 62%, {lightness:.2f}%)"


def render_word_shift_svg(report: WordShiftReport, style: SvgStyle | None = None) -> str:
    """Render the report as a horizontal bar chart in self-contained SVG.

    One bar per entry: direction decides the side, length is proportional to
    the percent contribution, and the fill is lighter the lower the context
    diversity on the word's own side.
    """
    st = style or SvgStyle()
    entries = report.entries
    height = st.margin_top + len(entries) * (st.bar_height + st.bar_gap) + st.margin_bottom
    center = st.width / 2
    half_span = st.width / 2 - st.margin_side
    max_percent = max((e.percent for e in entries), default=1.0)
    side_div = [
        (e.diversity_p if e.direction is Direction.CORPUS_P else e.diversity_q) or 0.0
        for e in entries
    ]
    max_div = max(side_div, default=0.0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{st.width}" height="{height}" '
        f'viewBox="0 0 {st.width} {height}">',
        f'<rect width="{st.width}" height="{height}" fill="white"/>',
    ]
    title = (
        f"word shift: #{report.anchor_a} vs #{report.anchor_b} "
        f"[{format_instant(report.window_start)}, {format_instant(report.window_end)})"
    )
    subtitle = f"total JSD = {report.total_jsd:.6f} bits"
    parts.append(
        f'<text x="{center:.1f}" y="20" text-anchor="middle" font-family="{st.font_family}" '
        f'font-size="{st.font_size + 2}">{escape(title)}</text>'
    )
    parts.append(
        f'<text x="{center:.1f}" y="38" text-anchor="middle" font-family="{st.font_family}" '
        f'font-size="{st.font_size}">{escape(subtitle)}</text>'
    )
    axis_y = height - st.margin_bottom + 12
    parts.append(
        f'<line x1="{center:.1f}" y1="{st.margin_top - 6}" x2="{center:.1f}" '
        f'y2="{axis_y - 8:.1f}" stroke="#444" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{center:.1f}" y="{axis_y + 16}" text-anchor="middle" '
        f'font-family="{st.font_family}" font-size="{st.font_size}">percent of total JSD</text>'
    )

    for row, (entry, diversity) in enumerate(zip(entries, side_div)):
        y = st.margin_top + row * (st.bar_height + st.bar_gap)
        length = half_span * entry.percent / max_percent
        leftward = entry.direction is st.left_direction
        x = center - length if leftward else center
        fill = _bar_fill(st, entry.direction, diversity, max_div)
        parts.append(
            f'<rect x="{x:.2f}" y="{y}" width="{length:.2f}" height="{st.bar_height}" '
            f'fill="{fill}" stroke="#333" stroke-width="0.5"/>'
        )
        label = f"{entry.token} ({entry.percent:.2f}%)"
        if leftward:
            text_x = center - length - 6
            anchor = "end"
        else:
            text_x = center + length + 6
            anchor = "start"
        parts.append(
            f'<text x="{text_x:.2f}" y="{y + st.bar_height - 4}" text-anchor="{anchor}" '
            f'font-family="{st.font_family}" font-size="{st.font_size}">{escape(label)}</text>'
        )

    left_anchor = report.anchor_a if st.left_direction is Direction.CORPUS_P else report.anchor_b
    right_anchor = report.anchor_b if st.left_direction is Direction.CORPUS_P else report.anchor_a
    parts.append(
        f'<text x="{st.margin_side / 2:.1f}" y="{st.margin_top - 10}" text-anchor="middle" '
        f'font-family="{st.font_family}" font-size="{st.font_size}">'
        f'&#8592; #{escape(left_anchor)}</text>'
    )
    parts.append(
        f'<text x="{st.width - st.margin_side / 2:.1f}" y="{st.margin_top - 10}" '
        f'text-anchor="middle" font-family="{st.font_family}" font-size="{st.font_size}">'
        f'#{escape(right_anchor)} &#8594;</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
