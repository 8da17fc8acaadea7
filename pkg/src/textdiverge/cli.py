"""Command-line pipeline orchestration.

Subcommands run the analysis stages over a TOML config and write every
artifact deterministically: identical config, inputs, and seed produce
byte-identical outputs, summarized by a manifest of content hashes. Each
artifact is written atomically (temp file, then rename) and the manifest is
written last.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from dataclasses import replace
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .config import ConfigError, RunConfig, load_config, validate_config
from .corpus import (
    EmptyCorpusError,
    InvalidIntervalError,
    StopList,
    Tweet,
    extract_hashtags,
    filter_window,
    frequency_timeseries,
    load_tweet_files,
    partition_by_anchor,
    write_timeseries_csv,
)
from .diversity import (
    InsufficientDataError,
    boxplot_stats,
    boxplot_summary_csv,
    derive_seed,
    samples_csv,
    subsample_diversity,
)
from .graphalgs import build_topic_network, centrality_csv, centrality_table
from .hashnet import backbone_stats_csv, build_cooccurrence, export_edgelist_csv, export_graphml, network_stats
from .wordshift import build_word_shift, export_word_shift_json, render_word_shift_svg

STAGES = ("timeseries", "shift", "network", "diversity")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

DATA_ERRORS = (
    EmptyCorpusError,
    InsufficientDataError,
    InvalidIntervalError,
    FileNotFoundError,
    OSError,
)


class StageError(RuntimeError):
    """A pipeline stage failed; the message names the stage, window, and anchor."""


def _slug(label: str) -> str:
    return re.sub(r"[^a-z0-9_-]+", "-", label.lower()).strip("-") or "window"


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class ArtifactWriter:
    """Writes artifacts under one output directory and records their hashes."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.records: list[dict[str, str]] = []

    def write(self, name: str, data: bytes | str, stage: str, window: str = "", anchor: str = "") -> None:
        blob = data.encode("utf-8") if isinstance(data, str) else data
        path = self.out_dir / name
        _write_atomic(path, blob)
        self.records.append(
            {
                "path": name,
                "sha256": hashlib.sha256(blob).hexdigest(),
                "stage": stage,
                "window": window,
                "anchor": anchor,
            }
        )

    def manifest(self, seed: int, stages: list[str], status: str, error: str | None = None) -> bytes:
        payload = {
            "status": status,
            "seed": seed,
            "stages": sorted(stages),
            "error": error,
            "artifacts": sorted(self.records, key=lambda r: r["path"]),
        }
        return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _month_spans(tweets: list[Tweet]) -> list[tuple[str, datetime, datetime]]:
    """Calendar-month (UTC) intervals covering the tweets' span."""
    if not tweets:
        return []
    stamps = [t.timestamp for t in tweets]
    first, last = min(stamps), max(stamps)
    spans = []
    year, month = first.year, first.month
    while (year, month) <= (last.year, last.month):
        start = datetime(year, month, 1, tzinfo=timezone.utc)
        year, month = (year + 1, 1) if month == 12 else (year, month + 1)
        end = datetime(year, month, 1, tzinfo=timezone.utc)
        spans.append((f"{start.year:04d}-{start.month:02d}", start, end))
    return spans


def cmd_run(config: RunConfig, stages: list[str]) -> Path:
    """Execute the requested stages and write artifacts plus a manifest.

    Returns the manifest path. On stage failure, artifacts already written
    stay in place, the manifest is written with status "incomplete", and a
    StageError naming the failing window/anchor is raised.
    """
    for stage in stages:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}; expected a subset of {STAGES}")
    config.out_dir.mkdir(parents=True, exist_ok=True)
    writer = ArtifactWriter(config.out_dir)

    tweets, rejected = load_tweet_files(config.tweet_files)
    if rejected:
        print(f"warning: {len(rejected)} malformed input lines rejected", file=sys.stderr)
    stoplist = StopList.from_file(config.stoplist_path) if config.stoplist_path else StopList.empty()
    corpus_a, corpus_b = partition_by_anchor(tweets, config.anchor_a, config.anchor_b)

    unit = "startup"
    try:
        if "timeseries" in stages:
            unit = "stage timeseries"
            anchors = {config.anchor_a, config.anchor_b}
            matching = [t for t in tweets if anchors & set(extract_hashtags(t.text))]
            series = frequency_timeseries(matching, timedelta(hours=config.bin_hours))
            writer.write("timeseries.csv", write_timeseries_csv(series), "timeseries")

        if "shift" in stages:
            for window in config.windows:
                unit = f"stage shift, window {window.label}"
                win_a = filter_window(corpus_a, window.start, window.end, config.anchor_a)
                win_b = filter_window(corpus_b, window.start, window.end, config.anchor_b)
                report = build_word_shift(win_a, win_b, stoplist, config.shift)
                slug = _slug(window.label)
                writer.write(
                    f"shift_{slug}.json", export_word_shift_json(report), "shift", window.label
                )
                writer.write(
                    f"shift_{slug}.svg", render_word_shift_svg(report), "shift", window.label
                )

        if "network" in stages:
            for window in config.windows:
                for anchor, corpus in ((config.anchor_a, corpus_a), (config.anchor_b, corpus_b)):
                    unit = f"stage network, window {window.label}, anchor #{anchor}"
                    win = filter_window(corpus, window.start, window.end, anchor)
                    graph = build_cooccurrence(win.tweets, anchors={anchor})
                    net = build_topic_network(
                        graph,
                        alpha=config.alpha,
                        seed=derive_seed(config.seed, "network", window.label, anchor),
                        damping=config.damping,
                        tol=config.tol,
                        max_iter=config.max_iter,
                        size_scale=config.size_scale,
                    )
                    slug = _slug(window.label)
                    stats = backbone_stats_csv(
                        [(anchor, window.label, network_stats(graph, net.graph))]
                    )
                    for name, payload in (
                        (f"network_{anchor}_{slug}.graphml", export_graphml(net)),
                        (f"network_{anchor}_{slug}_edges.csv", export_edgelist_csv(net.graph)),
                        (f"network_{anchor}_{slug}_stats.csv", stats),
                        (
                            f"network_{anchor}_{slug}_centrality.csv",
                            centrality_csv(centrality_table(net)),
                        ),
                    ):
                        writer.write(name, payload, "network", window.label, anchor)

        if "diversity" in stages:
            summary_rows = []
            for anchor, corpus in ((config.anchor_a, corpus_a), (config.anchor_b, corpus_b)):
                for month_label, start, end in _month_spans(corpus):
                    unit = f"stage diversity, window {month_label}, anchor #{anchor}"
                    win = filter_window(corpus, start, end, anchor)
                    if len(win.tweets) < config.sample_size and not config.with_replacement:
                        continue  # month too thin to subsample without replacement
                    for kind in ("lexical", "hashtag"):
                        exclude = (
                            {config.anchor_b if anchor == config.anchor_a else config.anchor_a}
                            if config.exclude_opposite_anchor
                            else set()
                        )
                        sample_set = subsample_diversity(
                            win,
                            kind,
                            sample_size=config.sample_size,
                            n_draws=config.n_draws,
                            seed=derive_seed(config.seed, "diversity", month_label, anchor, kind),
                            stoplist=stoplist,
                            with_replacement=config.with_replacement,
                            lexical_exclude_all_hashtags=config.lexical_exclude_all_hashtags,
                            exclude_hashtags=exclude,
                        )
                        writer.write(
                            f"diversity_{anchor}_{month_label}_{kind}.csv",
                            samples_csv(sample_set),
                            "diversity",
                            month_label,
                            anchor,
                        )
                        summary_rows.append((sample_set, boxplot_stats(sample_set.samples)))
            unit = "stage diversity, summary"
            writer.write("diversity_summary.csv", boxplot_summary_csv(summary_rows), "diversity")
    except Exception as exc:
        manifest = writer.manifest(config.seed, stages, "incomplete", f"{unit}: {exc}")
        _write_atomic(config.out_dir / "manifest.json", manifest)
        raise StageError(f"{unit}: {exc}") from exc

    manifest_path = config.out_dir / "manifest.json"
    _write_atomic(manifest_path, writer.manifest(config.seed, stages, "complete"))
    return manifest_path


def _load_for_command(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config)
    if args.out:
        config = replace(config, out_dir=Path(args.out))
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="textdiverge",
        description="Quantify how two anchor-hashtag corpora diverge.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="root RNG seed (overrides config)")

    validate_p = sub.add_parser("validate", help="check the config and referenced paths")
    validate_p.add_argument("--config", required=True)

    run_p = sub.add_parser("run", help="run selected pipeline stages")
    add_common(run_p)
    run_p.add_argument(
        "--stages",
        default=",".join(STAGES),
        help=f"comma-separated subset of: {', '.join(STAGES)}",
    )

    for stage in STAGES:
        stage_p = sub.add_parser(stage, help=f"run only the {stage} stage")
        add_common(stage_p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "validate":
        try:
            findings = validate_config(args.config)
        except (OSError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for finding in findings:
            print(str(finding), file=sys.stderr)
        if findings:
            return EXIT_CONFIG
        print("config ok")
        return EXIT_OK

    if args.command == "run":
        stages = [s.strip() for s in args.stages.split(",") if s.strip()]
        unknown = [s for s in stages if s not in STAGES]
        if unknown or not stages:
            print(f"unknown stages: {', '.join(unknown) or '(none given)'}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        stages = [args.command]

    try:
        config = _load_for_command(args)
    except ConfigError as exc:
        for finding in exc.findings:
            print(str(finding), file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        manifest_path = cmd_run(config, stages)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.__cause__
        return EXIT_DATA if isinstance(cause, DATA_ERRORS) else EXIT_INTERNAL
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(manifest_path)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
