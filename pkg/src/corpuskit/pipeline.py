"""Pipeline orchestration: ingestion -> langid -> dedup -> min_tokens ->
sharded output, with per-stage rejection accounting and a per-category
manifest.

The run is single-pass and streaming: each input document's text is read
exactly once and never materialized corpus-wide. Stage order is fixed
(langid first, then dedup, then min_tokens) so duplicate counts are taken
among documents that already passed language identification. In
deterministic mode (the default) sources are consumed sequentially in
config order, which makes keep-first dedup well-defined corpus-wide and
runs byte-identical.
"""

from __future__ import annotations

import gzip
import json
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .core import Document, SourceSpec, content_hash, normalize_for_hash
from .filters import DedupIndex, LangIdConfig, langid_filter, min_token_filter
from .records import RecordError, encode_record, read_documents

SCHEMA_VERSION = 1


class PipelineError(RuntimeError):
    """Fatal pipeline failure (unreadable source, shard write failure)."""


@dataclass
class PipelineConfig:
    sources: Sequence[tuple[SourceSpec, Path]]
    output_dir: Path
    langid: LangIdConfig = field(default_factory=LangIdConfig)
    min_tokens: int = 10
    shard_max_docs: int = 50_000
    deterministic: bool = True
    shard_gzip: bool = False

    def __post_init__(self) -> None:
        if self.shard_max_docs < 1:
            raise ValueError(f"shard_max_docs must be >= 1, got {self.shard_max_docs}")
        if self.min_tokens < 0:
            raise ValueError(f"min_tokens must be >= 0, got {self.min_tokens}")
        names = [spec.name for spec, _ in self.sources]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate source names: {', '.join(dupes)}")


@dataclass
class SourceTally:
    raw: int = 0
    retained: int = 0
    retained_words: int = 0


@dataclass
class PipelineReport:
    """Per-stage removal counts and retained totals.

    Invariant: raw_docs = removed_langid + removed_dedup + removed_min_tokens
    + retained_docs, and per-source tallies sum to the corpus totals.
    parse_errors counts malformed input lines, which are not documents and
    sit outside that identity.
    """

    raw_docs: int = 0
    removed_langid: int = 0
    removed_dedup: int = 0
    removed_min_tokens: int = 0
    retained_docs: int = 0
    retained_words: int = 0
    parse_errors: int = 0
    per_source: dict[str, SourceTally] = field(default_factory=dict)

    def validate(self) -> None:
        removed = self.removed_langid + self.removed_dedup + self.removed_min_tokens
        if self.raw_docs != removed + self.retained_docs:
            raise AssertionError(
                f"conservation violated: raw {self.raw_docs} != "
                f"removed {removed} + retained {self.retained_docs}"
            )
        if sum(t.raw for t in self.per_source.values()) != self.raw_docs:
            raise AssertionError("per-source raw counts do not sum to raw_docs")
        if sum(t.retained for t in self.per_source.values()) != self.retained_docs:
            raise AssertionError("per-source retained counts do not sum to retained_docs")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "raw_docs": self.raw_docs,
            "removed_langid": self.removed_langid,
            "removed_dedup": self.removed_dedup,
            "removed_min_tokens": self.removed_min_tokens,
            "retained_docs": self.retained_docs,
            "retained_words": self.retained_words,
            "parse_errors": self.parse_errors,
            "per_source": {
                name: {
                    "raw": tally.raw,
                    "retained": tally.retained,
                    "retained_words": tally.retained_words,
                }
                for name, tally in self.per_source.items()
            },
        }


def merge_reports(parts: Iterable[PipelineReport]) -> PipelineReport:
    """Field-wise sum of reports computed over disjoint document sets."""
    merged = PipelineReport()
    for part in parts:
        merged.raw_docs += part.raw_docs
        merged.removed_langid += part.removed_langid
        merged.removed_dedup += part.removed_dedup
        merged.removed_min_tokens += part.removed_min_tokens
        merged.retained_docs += part.retained_docs
        merged.retained_words += part.retained_words
        merged.parse_errors += part.parse_errors
        for name, tally in part.per_source.items():
            into = merged.per_source.setdefault(name, SourceTally())
            into.raw += tally.raw
            into.retained += tally.retained
            into.retained_words += tally.retained_words
    return merged


@dataclass
class Manifest:
    """Per-category rollup plus run provenance.

    ``categories`` maps category -> {sources, docs, words} over retained
    documents; category totals sum to the corpus totals. ``run_timestamp``
    is null in deterministic mode so repeated runs stay byte-identical.
    """

    categories: dict[str, dict]
    report: PipelineReport
    config_digest: str
    version: str
    run_timestamp: str | None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "categories": self.categories,
            "report": self.report.to_dict(),
            "config_digest": self.config_digest,
            "version": self.version,
            "run_timestamp": self.run_timestamp,
        }


@dataclass
class PipelineResult:
    report: PipelineReport
    manifest: Manifest
    shard_paths: list[Path]


def write_shard(
    docs: Sequence[Document | tuple[Document, Mapping[str, object] | None]],
    path: Path,
    use_gzip: bool = False,
) -> Path | None:
    """Write one shard file atomically; returns the path, or None for 0 docs.

    Entries may be plain Documents or (Document, extra-fields) pairs. The
    file appears only on completion (write to a temp name, then rename); on
    failure the partial temp file is removed and the error propagates.
    """
    if not docs:
        return None
    tmp = path.with_name(path.name + ".tmp")
    try:
        if use_gzip:
            # mtime=0 keeps gzip output byte-identical across runs
            handle = gzip.GzipFile(tmp, "wb", mtime=0)
        else:
            handle = open(tmp, "wb")
        try:
            for entry in docs:
                if isinstance(entry, Document):
                    doc, extra = entry, None
                else:
                    doc, extra = entry
                handle.write(encode_record(doc, extra).encode("utf-8"))
                handle.write(b"\n")
        finally:
            handle.close()
        os.replace(tmp, path)
    except OSError:
        tmp.unlink(missing_ok=True)
        raise
    return path


class _ShardSink:
    """Buffers retained documents per source and flushes bounded shards.

    Shards are named {source}-{serial:05d}.jsonl, serial in write order.
    """

    def __init__(self, output_dir: Path, shard_max_docs: int, use_gzip: bool, enabled: bool):
        self.output_dir = output_dir
        self.shard_max_docs = shard_max_docs
        self.use_gzip = use_gzip
        self.enabled = enabled
        self.paths: list[Path] = []
        self._buffer: list[tuple[Document, Mapping[str, object]]] = []
        self._source: str | None = None
        self._serial = 0

    def start_source(self, name: str) -> None:
        self.flush()
        self._source = name
        self._serial = 0

    def add(self, doc: Document, extra: Mapping[str, object]) -> None:
        if not self.enabled:
            return
        self._buffer.append((doc, extra))
        if len(self._buffer) >= self.shard_max_docs:
            self.flush()

    def flush(self) -> None:
        if not self._buffer:
            return
        suffix = ".jsonl.gz" if self.use_gzip else ".jsonl"
        path = self.output_dir / f"{self._source}-{self._serial:05d}{suffix}"
        try:
            written = write_shard(self._buffer, path, use_gzip=self.use_gzip)
        except OSError as exc:
            raise PipelineError(f"failed writing shard {path}: {exc}") from exc
        if written is not None:
            self.paths.append(written)
        self._serial += 1
        self._buffer = []


def run_pipeline(
    config: PipelineConfig,
    config_digest: str = "",
    write_shards: bool = True,
) -> PipelineResult:
    """Run the full filter pipeline over all configured sources.

    Every retained document lands in exactly one output shard, unmodified
    except for the added provenance fields {script_ratio, token_count,
    content_hash}. Malformed lines, records whose source field does not
    match the registered source, and repeated document ids are tallied as
    parse_errors and skipped, never silently dropped (each is logged to the
    report only; the conservation identity covers parsed documents).
    """
    for spec, path in config.sources:
        if not Path(path).is_file():
            raise PipelineError(f"source {spec.name!r}: input not readable: {path}")

    output_dir = Path(config.output_dir)
    if write_shards:
        output_dir.mkdir(parents=True, exist_ok=True)

    report = PipelineReport()
    dedup = DedupIndex()
    seen_ids: set[str] = set()
    sink = _ShardSink(output_dir, config.shard_max_docs, config.shard_gzip, enabled=write_shards)

    for spec, path in config.sources:
        tally = report.per_source.setdefault(spec.name, SourceTally())
        sink.start_source(spec.name)

        def _on_error(lineno: int, exc: RecordError) -> None:
            report.parse_errors += 1

        for doc in read_documents(path, on_error=_on_error):
            if doc.source_id != spec.name or doc.id in seen_ids:
                report.parse_errors += 1
                continue
            seen_ids.add(doc.id)
            report.raw_docs += 1
            tally.raw += 1

            lang = langid_filter(doc, config.langid)
            if not lang.keep:
                report.removed_langid += 1
                continue
            digest = content_hash(normalize_for_hash(doc.text))
            if not dedup.check_and_insert(digest):
                report.removed_dedup += 1
                continue
            length = min_token_filter(doc, config.min_tokens)
            if not length.keep:
                report.removed_min_tokens += 1
                continue

            report.retained_docs += 1
            report.retained_words += length.detail
            tally.retained += 1
            tally.retained_words += length.detail
            sink.add(
                doc,
                {
                    "script_ratio": lang.detail,
                    "token_count": length.detail,
                    "content_hash": digest.hex(),
                },
            )
        sink.flush()

    report.validate()
    manifest = build_manifest(config, report, config_digest)
    return PipelineResult(report=report, manifest=manifest, shard_paths=sink.paths)


def build_manifest(config: PipelineConfig, report: PipelineReport, config_digest: str) -> Manifest:
    categories: dict[str, dict] = {}
    for spec, _ in config.sources:
        rollup = categories.setdefault(spec.category, {"sources": 0, "docs": 0, "words": 0})
        tally = report.per_source.get(spec.name, SourceTally())
        rollup["sources"] += 1
        rollup["docs"] += tally.retained
        rollup["words"] += tally.retained_words
    timestamp = None
    if not config.deterministic:
        timestamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return Manifest(
        categories=categories,
        report=report,
        config_digest=config_digest,
        version=__version__,
        run_timestamp=timestamp,
    )


def write_json(obj: Mapping, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(obj, handle, ensure_ascii=False, indent=2)
        handle.write("\n")
    return path
