"""Operator surface: crawl, pipeline, stats, ablate, and coverage
subcommands over one config file.

Exit codes are a stable contract: 0 success, 1 runtime failure, 2
usage/config error. Percentages in printed tables are always recomputed
from counts, never taken from stored values.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analytics import (
    AnalyticsError,
    VocabIndex,
    build_vocab_index,
    coverage,
    leave_one_out,
    load_groups,
    load_index,
    load_token_sets,
    marginal_vocab_table,
    save_index,
    vocab_growth_curve,
    zipf_fit,
)
from .config import ConfigError, LoadedConfig, load_config
from .harvest import CrawlState, crawl, urllib_fetcher
from .pipeline import PipelineError, run_pipeline, write_json
from .records import read_documents, write_documents

CONFIG_ENV_VAR = "CORPUSKIT_CONFIG"

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Operator mistake: bad flags, missing files, unknown names."""


def _pct(count: int, total: int) -> str:
    if total == 0:
        return "-"
    return f"{100.0 * count / total:.1f}%"


def _print_report_table(report) -> None:
    raw = report.raw_docs
    rows = [
        ("langid", report.removed_langid),
        ("dedup", report.removed_dedup),
        ("min_tokens", report.removed_min_tokens),
    ]
    print(f"{'stage':<14}{'docs_removed':>14}{'pct_of_raw':>12}")
    for stage, count in rows:
        print(f"{stage:<14}{count:>14,}{_pct(count, raw):>12}")
    rejected = sum(count for _, count in rows)
    print(f"{'total_rejected':<14}{rejected:>14,}{_pct(rejected, raw):>12}")
    print(f"{'retained':<14}{report.retained_docs:>14,}{_pct(report.retained_docs, raw):>12}")
    print(f"{'raw':<14}{raw:>14,}")
    if report.parse_errors:
        print(f"parse_errors  {report.parse_errors:>14,}")


def _require_config(args) -> LoadedConfig:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if not config_path:
        raise UsageError(f"no config file given (use --config or ${CONFIG_ENV_VAR})")
    loaded = load_config(config_path)
    if args.output_dir is not None:
        loaded.pipeline.output_dir = Path(args.output_dir)
    if args.deterministic is not None:
        loaded.pipeline.deterministic = args.deterministic
    return loaded


def _cmd_pipeline(args) -> int:
    loaded = _require_config(args)
    for spec, path in loaded.pipeline.sources:
        if not Path(path).is_file():
            raise UsageError(f"source {spec.name!r}: input file not found: {path}")
    result = run_pipeline(
        loaded.pipeline,
        config_digest=loaded.config_digest,
        write_shards=not args.dry_run,
    )
    out_dir = Path(loaded.pipeline.output_dir)
    report_path = write_json(result.report.to_dict(), out_dir / "report.json")
    manifest_path = write_json(result.manifest.to_dict(), out_dir / "manifest.json")
    _print_report_table(result.report)
    print(f"wrote {len(result.shard_paths)} shard(s), {report_path}, {manifest_path}")
    return EXIT_OK


def _cmd_crawl(args) -> int:
    loaded = _require_config(args)
    spider = loaded.spiders.get(args.source)
    if spider is None:
        known = ", ".join(sorted(loaded.spiders)) or "(none)"
        raise UsageError(f"unknown crawl source {args.source!r}; configured spiders: {known}")
    if args.max_pages is not None:
        spider = replace(spider, max_pages=args.max_pages)
    timestamp = None
    if not loaded.pipeline.deterministic:
        from datetime import datetime, timezone

        timestamp = lambda: datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    state = CrawlState()
    out_path = loaded.source_inputs[args.source]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    docs = crawl(spider, urllib_fetcher(user_agent=spider.user_agent), state=state, timestamp=timestamp)
    written = write_documents(out_path, docs)
    print(
        f"pages_fetched={state.pages_fetched} docs_emitted={state.docs_emitted} "
        f"errors={state.errors} -> {out_path} ({written} records)"
    )
    return EXIT_OK


def _load_or_build_index(args) -> VocabIndex:
    if args.index:
        return load_index(args.index)
    if not args.shards:
        raise UsageError("give either --index STEM or one or more shard files")
    for shard in args.shards:
        if not Path(shard).is_file():
            raise UsageError(f"shard file not found: {shard}")

    def stream():
        for shard in args.shards:
            yield from read_documents(shard)

    return build_vocab_index(stream())


def _out_dir(args) -> Path:
    out = Path(args.output_dir) if args.output_dir else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_stats(args) -> int:
    index = _load_or_build_index(args)
    out_dir = _out_dir(args)
    if args.save_index:
        paths = save_index(index, args.save_index)
        print(f"saved index: {', '.join(str(p) for p in paths)}")
    print(
        f"docs={index.total_docs:,} tokens={index.total_tokens:,} types={index.vocab_size:,}"
    )
    if args.zipf:
        fit = zipf_fit(index, top_k=args.top_k)
        print(f"zipf alpha={fit.alpha:.3f} r2={fit.r_squared:.3f} n_ranks={fit.n_ranks}")
        write_json(
            {
                "schema_version": 1,
                "alpha": fit.alpha,
                "r_squared": fit.r_squared,
                "n_ranks": fit.n_ranks,
                "intercept": fit.intercept,
            },
            out_dir / "zipf.json",
        )
    if args.growth:
        curve = vocab_growth_curve(index, index.per_source_docs)
        path = out_dir / "growth.tsv"
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("source\tdocs\tcumulative_vocab\n")
            for source, cumulative in curve:
                handle.write(f"{source}\t{index.per_source_docs[source]}\t{cumulative}\n")
        print(f"growth curve -> {path}")
    if args.marginal:
        table = marginal_vocab_table(index)
        path = out_dir / "marginal.tsv"
        total = index.vocab_size
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("source\tdocs\tmarginal_vocab\tpct_of_vocab\n")
            for source in sorted(table, key=lambda s: (-table[s], s)):
                handle.write(
                    f"{source}\t{index.per_source_docs.get(source, 0)}\t{table[source]}\t"
                    f"{_pct(table[source], total)}\n"
                )
        print(f"{'source':<20}{'marginal_vocab':>15}{'pct_of_vocab':>14}")
        for source in sorted(table, key=lambda s: (-table[s], s)):
            print(f"{source:<20}{table[source]:>15,}{_pct(table[source], total):>14}")
        print(f"marginal table -> {path}")
    return EXIT_OK


def _cmd_ablate(args) -> int:
    index = _load_or_build_index(args)
    out_dir = _out_dir(args)
    for path in (args.groups, args.tokens):
        if not Path(path).is_file():
            raise UsageError(f"file not found: {path}")
    groups = load_groups(args.groups)
    token_sets = load_token_sets(args.tokens)
    entity_tokens = set()
    for _, tokens in token_sets:
        entity_tokens |= tokens
    try:
        rows = leave_one_out(index, groups, entity_tokens)
    except AnalyticsError as exc:
        raise UsageError(str(exc)) from exc
    print(f"{'group_removed':<20}{'docs':>10}{'vocab':>12}{'vocab_lost':>12}{'coverage':>10}")
    for row in rows:
        lost = _pct(index.vocab_size - row.vocab_remaining, index.vocab_size)
        print(
            f"{row.group:<20}{row.docs_removed:>10,}{row.vocab_remaining:>12,}"
            f"{lost:>12}{100.0 * row.coverage_after:>9.1f}%"
        )
    write_json(
        {
            "schema_version": 1,
            "rows": [
                {
                    "group": row.group,
                    "docs_removed": row.docs_removed,
                    "vocab_remaining": row.vocab_remaining,
                    "vocab_lost_fraction": row.vocab_lost_fraction,
                    "coverage_after": row.coverage_after,
                }
                for row in rows
            ],
        },
        out_dir / "ablation.json",
    )
    print(f"ablation report -> {out_dir / 'ablation.json'}")
    return EXIT_OK


def _cmd_coverage(args) -> int:
    index = _load_or_build_index(args)
    out_dir = _out_dir(args)
    if not Path(args.tokens).is_file():
        raise UsageError(f"file not found: {args.tokens}")
    token_sets = load_token_sets(args.tokens)
    report = coverage(index, token_sets)
    print(f"{'token_set':<20}{'covered':>10}{'total':>10}{'coverage':>10}")
    for row in report.rows:
        print(f"{row.label:<20}{row.covered:>10,}{row.total:>10,}{100.0 * row.fraction:>9.1f}%")
    write_json(
        {
            "schema_version": 1,
            "rows": [
                {
                    "label": row.label,
                    "covered": row.covered,
                    "total": row.total,
                    "coverage": row.fraction,
                }
                for row in report.rows
            ],
        },
        out_dir / "coverage.json",
    )
    print(f"coverage report -> {out_dir / 'coverage.json'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpuskit",
        description="Streaming corpus construction and analysis toolkit",
    )
    parser.add_argument("--version", action="version", version=f"corpuskit {__version__}")
    parser.add_argument("--config", help=f"config file (default: ${CONFIG_ENV_VAR})")
    parser.add_argument("--output-dir", help="directory for reports and shards")
    parser.add_argument("--jobs", type=int, default=1, help="worker count upper bound")
    parser.add_argument(
        "--deterministic",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="force deterministic mode on/off (default: from config)",
    )
    parser.add_argument("--dry-run", action="store_true", help="report only; write no shards")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("pipeline", help="run langid -> dedup -> min_tokens over all sources")

    crawl_p = sub.add_parser("crawl", help="run one configured spider")
    crawl_p.add_argument("--source", required=True, help="spider name ([source.NAME] section)")
    crawl_p.add_argument("--max-pages", type=int, default=None, help="override the page budget")

    stats_p = sub.add_parser("stats", help="vocabulary statistics over shards or a saved index")
    stats_p.add_argument("shards", nargs="*", help="shard files in the output record format")
    stats_p.add_argument("--index", help="stem of a saved index to load")
    stats_p.add_argument("--save-index", help="stem to persist the built index under")
    stats_p.add_argument("--zipf", action="store_true", help="fit the rank-frequency power law")
    stats_p.add_argument("--top-k", type=int, default=100_000, help="ranks used by --zipf")
    stats_p.add_argument("--growth", action="store_true", help="cumulative vocabulary curve")
    stats_p.add_argument("--marginal", action="store_true", help="per-source marginal vocabulary")

    ablate_p = sub.add_parser("ablate", help="leave-one-out source-group ablation")
    ablate_p.add_argument("shards", nargs="*", help="shard files in the output record format")
    ablate_p.add_argument("--index", help="stem of a saved index to load")
    ablate_p.add_argument("--groups", required=True, help="two-column 'group<TAB>source' file")
    ablate_p.add_argument("--tokens", required=True, help="two-column 'category<TAB>token' file")

    coverage_p = sub.add_parser("coverage", help="external token-set coverage")
    coverage_p.add_argument("shards", nargs="*", help="shard files in the output record format")
    coverage_p.add_argument("--index", help="stem of a saved index to load")
    coverage_p.add_argument("--tokens", required=True, help="two-column 'category<TAB>token' file")

    return parser


_COMMANDS = {
    "pipeline": _cmd_pipeline,
    "crawl": _cmd_crawl,
    "stats": _cmd_stats,
    "ablate": _cmd_ablate,
    "coverage": _cmd_coverage,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PipelineError, AnalyticsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
