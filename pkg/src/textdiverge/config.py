"""Run configuration: TOML loading and validation.

Every tunable documented by the analysis modules surfaces here with its
default, so a single config file drives the whole pipeline. Validation
collects every problem (with a field path) instead of stopping at the
first one.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .corpus import parse_instant
from .wordshift import WEIGHT_MODES, ShiftConfig


@dataclass(frozen=True)
class Finding:
    """One validation problem, addressed by config field path."""

    field_path: str
    message: str

    def __str__(self) -> str:
        return f"{self.field_path}: {self.message}"


class ConfigError(ValueError):
    """Raised when a config file cannot be turned into a clean RunConfig."""

    def __init__(self, findings: list[Finding]):
        super().__init__("; ".join(str(f) for f in findings))
        self.findings = findings


@dataclass(frozen=True)
class WindowSpec:
    label: str
    start: datetime
    end: datetime


@dataclass(frozen=True)
class RunConfig:
    tweet_files: tuple[Path, ...]
    anchor_a: str
    anchor_b: str
    out_dir: Path
    windows: tuple[WindowSpec, ...] = ()
    stoplist_path: Path | None = None
    seed: int = 0
    # timeseries
    bin_hours: int = 24
    # word shift
    shift: ShiftConfig = field(default_factory=ShiftConfig)
    # network
    alpha: float = 0.03
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 1000
    size_scale: float = 1.0
    # diversity
    sample_size: int = 2000
    n_draws: int = 1000
    with_replacement: bool = False
    lexical_exclude_all_hashtags: bool = True
    exclude_opposite_anchor: bool = False


def _parse_date(value: object, field_path: str, findings: list[Finding]) -> datetime | None:
    if not isinstance(value, str):
        findings.append(Finding(field_path, f"expected an ISO-8601 string, got {value!r}"))
        return None
    text = value if "T" in value else value + "T00:00:00Z"
    try:
        return parse_instant(text)
    except ValueError as exc:
        findings.append(Finding(field_path, str(exc)))
        return None


def _section(raw: dict, name: str) -> dict:
    value = raw.get(name, {})
    return value if isinstance(value, dict) else {}


def load_config(path: str | Path, base_dir: Path | None = None) -> RunConfig:
    """Parse and fully validate a TOML config; raises ConfigError listing
    every violation with its field path. Relative paths resolve against the
    config file's directory."""
    path = Path(path)
    with open(path, "rb") as handle:
        raw = tomllib.load(handle)
    base = base_dir if base_dir is not None else path.parent
    findings: list[Finding] = []

    section = _section(raw, "input")
    tweet_files: list[Path] = []
    raw_tweets = section.get("tweets")
    if not isinstance(raw_tweets, list) or not raw_tweets:
        findings.append(Finding("input.tweets", "must be a nonempty list of file paths"))
    else:
        for i, entry in enumerate(raw_tweets):
            candidate = base / str(entry)
            if not candidate.is_file():
                findings.append(Finding(f"input.tweets[{i}]", f"file not found: {candidate}"))
            tweet_files.append(candidate)
    anchor_a = str(section.get("anchor_a", "")).lower().lstrip("#")
    anchor_b = str(section.get("anchor_b", "")).lower().lstrip("#")
    if not anchor_a:
        findings.append(Finding("input.anchor_a", "missing anchor hashtag"))
    if not anchor_b:
        findings.append(Finding("input.anchor_b", "missing anchor hashtag"))
    if anchor_a and anchor_a == anchor_b:
        findings.append(Finding("input.anchor_b", "anchors must be distinct"))
    stoplist_path = None
    if "stoplist" in section:
        stoplist_path = base / str(section["stoplist"])
        if not stoplist_path.is_file():
            findings.append(Finding("input.stoplist", f"file not found: {stoplist_path}"))

    out_section = _section(raw, "output")
    out_dir = base / str(out_section.get("dir", "out"))

    run_section = _section(raw, "run")
    seed = run_section.get("seed", 0)
    if not isinstance(seed, int):
        findings.append(Finding("run.seed", f"expected an integer, got {seed!r}"))
        seed = 0

    windows: list[WindowSpec] = []
    raw_windows = raw.get("windows", [])
    if not isinstance(raw_windows, list):
        findings.append(Finding("windows", "must be an array of tables"))
        raw_windows = []
    for i, entry in enumerate(raw_windows):
        if not isinstance(entry, dict):
            findings.append(Finding(f"windows[{i}]", "must be a table"))
            continue
        label = str(entry.get("label", f"window{i}"))
        start = _parse_date(entry.get("start"), f"windows[{i}].start", findings)
        end = _parse_date(entry.get("end"), f"windows[{i}].end", findings)
        if start is not None and end is not None:
            if start >= end:
                findings.append(Finding(f"windows[{i}]", "start must be before end"))
            else:
                windows.append(WindowSpec(label=label, start=start, end=end))

    def _number(section_name: str, key: str, default: float, lo: float, hi: float,
                strict_lo: bool = False, strict_hi: bool = False) -> float:
        value = _section(raw, section_name).get(key, default)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            findings.append(Finding(f"{section_name}.{key}", f"expected a number, got {value!r}"))
            return default
        value = float(value)
        bad_lo = value <= lo if strict_lo else value < lo
        bad_hi = value >= hi if strict_hi else value > hi
        if bad_lo or bad_hi:
            left, right = "(" if strict_lo else "[", ")" if strict_hi else "]"
            findings.append(
                Finding(f"{section_name}.{key}", f"{value} outside range {left}{lo}, {hi}{right}")
            )
        return value

    def _integer(section_name: str, key: str, default: int, minimum: int) -> int:
        value = _section(raw, section_name).get(key, default)
        if not isinstance(value, int) or isinstance(value, bool):
            findings.append(Finding(f"{section_name}.{key}", f"expected an integer, got {value!r}"))
            return default
        if value < minimum:
            findings.append(Finding(f"{section_name}.{key}", f"{value} is below minimum {minimum}"))
        return value

    def _boolean(section_name: str, key: str, default: bool) -> bool:
        value = _section(raw, section_name).get(key, default)
        if not isinstance(value, bool):
            findings.append(Finding(f"{section_name}.{key}", f"expected a boolean, got {value!r}"))
            return default
        return value

    bin_hours = _integer("timeseries", "bin_hours", 24, 1)

    top_k = _integer("shift", "top_k", 50, 1)
    threshold = _number("shift", "diversity_threshold_bits", 3.0, 0.0, float("inf"))
    min_occurrences = _integer("shift", "min_occurrences", 1, 1)
    weight_mode = _section(raw, "shift").get("weight_mode", "token_counts")
    if weight_mode not in WEIGHT_MODES:
        findings.append(Finding("shift.weight_mode", f"must be one of {WEIGHT_MODES}"))
        weight_mode = "token_counts"

    alpha = _number("network", "alpha", 0.03, 0.0, 1.0, strict_lo=True, strict_hi=True)
    size_scale = _number("network", "size_scale", 1.0, 0.0, float("inf"), strict_lo=True)
    damping = _number("centrality", "damping", 0.85, 0.0, 1.0, strict_lo=True, strict_hi=True)
    tol = _number("centrality", "tol", 1e-10, 0.0, float("inf"), strict_lo=True)
    max_iter = _integer("centrality", "max_iter", 1000, 1)

    sample_size = _integer("diversity", "sample_size", 2000, 1)
    n_draws = _integer("diversity", "n_draws", 1000, 1)
    with_replacement = _boolean("diversity", "with_replacement", False)
    lexical_all = _boolean("diversity", "lexical_exclude_all_hashtags", True)
    exclude_opposite = _boolean("diversity", "exclude_opposite_anchor", False)

    if findings:
        raise ConfigError(findings)

    return RunConfig(
        tweet_files=tuple(tweet_files),
        anchor_a=anchor_a,
        anchor_b=anchor_b,
        out_dir=out_dir,
        windows=tuple(windows),
        stoplist_path=stoplist_path,
        seed=seed,
        bin_hours=bin_hours,
        shift=ShiftConfig(
            top_k=top_k,
            diversity_threshold_bits=threshold,
            weight_mode=weight_mode,
            min_occurrences=min_occurrences,
        ),
        alpha=alpha,
        damping=damping,
        tol=tol,
        max_iter=max_iter,
        size_scale=size_scale,
        sample_size=sample_size,
        n_draws=n_draws,
        with_replacement=with_replacement,
        lexical_exclude_all_hashtags=lexical_all,
        exclude_opposite_anchor=exclude_opposite,
    )


def validate_config(path: str | Path) -> list[Finding]:
    """All validation findings for a config file; empty means clean."""
    try:
        load_config(path)
    except ConfigError as exc:
        return exc.findings
    return []
