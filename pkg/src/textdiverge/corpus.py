"""Corpus ingestion and tokenization.

Reads timestamped posts from newline-delimited JSON files, tokenizes them
(lowercasing, stripping handles, links, punctuation, stop words, the "RT"
marker and the anchor hashtags), partitions them into anchor-hashtag corpora
and time windows, and builds token/hashtag frequency distributions.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import BinaryIO, Iterable

HASHTAG_RE = re.compile(r"#(\w+)")
HANDLE_RE = re.compile(r"@\w+")
URL_RE = re.compile(r"https?://\S+|\bwww\.\S+")
# '#' is a token character only as a hashtag prefix; '_' and alphanumerics
# are token characters everywhere; everything else separates tokens.
TOKEN_RE = re.compile(r"#\w+|\w+")


class EmptyCorpusError(ValueError):
    """A corpus slice contained no tokens where at least one was required."""


class InvalidIntervalError(ValueError):
    """A time interval had start >= end."""


def parse_instant(value: str) -> datetime:
    """Parse an ISO-8601 timestamp with zone into a UTC instant (second precision).

    Accepts a trailing 'Z' as UTC. Naive timestamps are rejected: a record
    without zone information cannot be placed on the UTC timeline.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    moment = datetime.fromisoformat(text)
    if moment.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no zone information")
    return moment.astimezone(timezone.utc).replace(microsecond=0)


def format_instant(moment: datetime) -> str:
    return moment.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Tweet:
    """One ingested post."""

    id: str
    timestamp: datetime  # UTC, second precision
    user_id: str
    text: str


@dataclass(frozen=True)
class RejectedRecord:
    """A malformed input line, kept for reporting instead of aborting the stream."""

    line: int  # 1-based line number in the input stream
    reason: str


@dataclass(frozen=True)
class TokenBag:
    """Multiset of tokens from a corpus slice."""

    counts: dict[str, int]

    def __post_init__(self) -> None:
        for token, count in self.counts.items():
            if not token:
                raise ValueError("token bag contains an empty token")
            if count < 1:
                raise ValueError(f"token {token!r} has non-positive count {count}")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "TokenBag":
        return cls(dict(Counter(tokens)))


@dataclass(frozen=True)
class TokenDistribution:
    """Normalized bag of words: probabilities summing to 1, raw mass retained."""

    probs: dict[str, float]
    total_tokens: int

    @property
    def support_size(self) -> int:
        return len(self.probs)

    def validate(self, tol: float = 1e-12) -> None:
        if not self.probs:
            raise ValueError("distribution has empty support")
        if any(p <= 0.0 for p in self.probs.values()):
            raise ValueError("distribution has a non-positive probability")
        mass = math.fsum(self.probs.values())
        if abs(mass - 1.0) > tol:
            raise ValueError(f"distribution mass {mass} is not 1 within {tol}")


def build_distribution(bag: TokenBag) -> TokenDistribution:
    """Normalize a token bag into a probability distribution."""
    total = bag.total
    if total <= 0:
        raise EmptyCorpusError("cannot build a distribution from an empty token bag")
    probs = {token: count / total for token, count in sorted(bag.counts.items())}
    return TokenDistribution(probs=probs, total_tokens=total)


@dataclass(frozen=True)
class StopList:
    """Set of lowercase tokens removed during tokenization."""

    entries: frozenset[str]

    def __post_init__(self) -> None:
        for entry in self.entries:
            if not entry or entry != entry.lower():
                raise ValueError(f"stop list entry {entry!r} must be lowercase and nonempty")

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    @classmethod
    def empty(cls) -> "StopList":
        return cls(frozenset())

    @classmethod
    def from_file(cls, path: str | Path) -> "StopList":
        """Load one token per line; lines starting with '#' are comments."""
        entries = set()
        with open(path, encoding="utf-8") as handle:
            for raw in handle:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                entries.add(line.lower())
        return cls(frozenset(entries))


@dataclass(frozen=True)
class CorpusWindow:
    """Tweets of one anchor hashtag inside a half-open time interval [start, end)."""

    anchor: str  # lowercased, without '#'
    start: datetime
    end: datetime
    tweets: tuple[Tweet, ...]

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise InvalidIntervalError(f"window start {self.start} is not before end {self.end}")
        for tweet in self.tweets:
            if not self.start <= tweet.timestamp < self.end:
                raise ValueError(f"tweet {tweet.id} at {tweet.timestamp} falls outside the window")
            if self.anchor not in extract_hashtags(tweet.text):
                raise ValueError(f"tweet {tweet.id} does not contain the anchor #{self.anchor}")


def parse_tweet_stream(
    stream: BinaryIO | Iterable[bytes],
) -> tuple[list[Tweet], list[RejectedRecord]]:
    """Parse newline-delimited JSON records into tweets.

    Each line must be a JSON object with string fields id, created_at (ISO-8601
    with zone), user_id, and text. Malformed lines are collected as
    RejectedRecord entries; one bad line never aborts the stream.
    """
    tweets: list[Tweet] = []
    rejected: list[RejectedRecord] = []
    seen_ids: set[str] = set()
    for line_no, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            rejected.append(RejectedRecord(line_no, f"invalid UTF-8: {exc}"))
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            rejected.append(RejectedRecord(line_no, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(record, dict):
            rejected.append(RejectedRecord(line_no, "record is not a JSON object"))
            continue
        problem = None
        values: dict[str, str] = {}
        for fld in ("id", "created_at", "user_id", "text"):
            value = record.get(fld)
            if value is None:
                problem = f"missing field {fld!r}"
                break
            # ids are frequently serialized as JSON numbers in tweet dumps
            if isinstance(value, int) and fld in ("id", "user_id"):
                value = str(value)
            if not isinstance(value, str):
                problem = f"field {fld!r} is not a string"
                break
            values[fld] = value
        if problem:
            rejected.append(RejectedRecord(line_no, problem))
            continue
        if not values["id"]:
            rejected.append(RejectedRecord(line_no, "empty id"))
            continue
        if values["id"] in seen_ids:
            rejected.append(RejectedRecord(line_no, f"duplicate id {values['id']!r}"))
            continue
        try:
            timestamp = parse_instant(values["created_at"])
        except ValueError as exc:
            rejected.append(RejectedRecord(line_no, f"bad created_at: {exc}"))
            continue
        seen_ids.add(values["id"])
        tweets.append(
            Tweet(id=values["id"], timestamp=timestamp, user_id=values["user_id"], text=values["text"])
        )
    return tweets, rejected


def load_tweet_files(paths: Iterable[str | Path]) -> tuple[list[Tweet], list[RejectedRecord]]:
    """Parse several NDJSON files in order, merging results by input order.

    Rejection line numbers restart per file; the duplicate-id check spans the
    whole merged stream.
    """
    all_tweets: list[Tweet] = []
    all_rejected: list[RejectedRecord] = []
    seen: set[str] = set()
    for path in paths:
        with open(path, "rb") as handle:
            tweets, rejected = parse_tweet_stream(handle)
        all_rejected.extend(rejected)
        for tweet in tweets:
            if tweet.id in seen:
                all_rejected.append(RejectedRecord(0, f"duplicate id {tweet.id!r} across files"))
                continue
            seen.add(tweet.id)
            all_tweets.append(tweet)
    return all_tweets, all_rejected


def extract_hashtags(text: str) -> list[str]:
    """Return hashtags in occurrence order, lowercased, without '#', duplicates kept."""
    return [tag.lower() for tag in HASHTAG_RE.findall(text)]


def tokenize(text: str, anchors: Iterable[str] = (), stoplist: StopList | None = None) -> list[str]:
    """Tokenize one post.

    Lowercases, removes URLs and @-handles, splits on punctuation (anything
    that is not alphanumeric, '#', or '_'), then drops the standalone token
    "rt", stop list members, and the anchor hashtags. Non-anchor hashtags are
    kept as tokens of the form "#tag".
    """
    anchor_tokens = {"#" + anchor for anchor in anchors}
    stop = stoplist or StopList.empty()
    cleaned = text.lower()
    cleaned = URL_RE.sub(" ", cleaned)
    cleaned = HANDLE_RE.sub(" ", cleaned)
    tokens = []
    for token in TOKEN_RE.findall(cleaned):
        if token == "rt" or token in stop or token in anchor_tokens:
            continue
        tokens.append(token)
    return tokens


def partition_by_anchor(
    tweets: Iterable[Tweet], anchor_a: str, anchor_b: str
) -> tuple[list[Tweet], list[Tweet]]:
    """Split tweets by anchor hashtag; a tweet containing both lands in both corpora."""
    if anchor_a == anchor_b:
        raise ValueError("anchors must be distinct")
    corpus_a: list[Tweet] = []
    corpus_b: list[Tweet] = []
    for tweet in tweets:
        tags = set(extract_hashtags(tweet.text))
        if anchor_a in tags:
            corpus_a.append(tweet)
        if anchor_b in tags:
            corpus_b.append(tweet)
    return corpus_a, corpus_b


def filter_window(
    tweets: Iterable[Tweet], start: datetime, end: datetime, anchor: str
) -> CorpusWindow:
    """Keep tweets with start <= timestamp < end, order preserved."""
    if start >= end:
        raise InvalidIntervalError(f"start {start} must be before end {end}")
    selected = tuple(t for t in tweets if start <= t.timestamp < end)
    return CorpusWindow(anchor=anchor, start=start, end=end, tweets=selected)


def frequency_timeseries(
    tweets: Iterable[Tweet], bin_size: timedelta
) -> list[tuple[datetime, int]]:
    """Count tweets per time bin.

    Bins are aligned to multiples of the bin size since the UTC epoch, so
    daily bins start at UTC midnight. Bins with zero tweets inside the
    observed span are emitted with count 0.
    """
    if bin_size <= timedelta(0):
        raise ValueError("bin size must be positive")
    epoch = datetime(1970, 1, 1, tzinfo=timezone.utc)
    step = bin_size.total_seconds()
    counts: Counter[int] = Counter()
    for tweet in tweets:
        index = math.floor((tweet.timestamp - epoch).total_seconds() / step)
        counts[index] += 1
    if not counts:
        return []
    lo, hi = min(counts), max(counts)
    return [
        (epoch + timedelta(seconds=index * step), counts.get(index, 0))
        for index in range(lo, hi + 1)
    ]


def write_timeseries_csv(series: list[tuple[datetime, int]]) -> str:
    """Render a frequency time series as CSV with header bin_start,count."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["bin_start", "count"])
    for bin_start, count in series:
        writer.writerow([format_instant(bin_start), count])
    return buffer.getvalue()
