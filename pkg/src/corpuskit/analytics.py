"""Corpus statistics over a vocabulary index: Zipf fit, growth curves,
marginal vocabulary, leave-one-out ablation, and coverage of external
token sets.

The index is built in a single pass over a document stream and can be
persisted as line-delimited TSV files (plus a small JSON meta file) for
external tools. All analysis operations are read-only over a completed
index.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence, Set
from dataclasses import dataclass, field
from pathlib import Path

from .core import Document, tokenize

META_SCHEMA_VERSION = 1


class AnalyticsError(ValueError):
    pass


class DegenerateFitError(AnalyticsError):
    pass


@dataclass
class VocabIndex:
    """Word-type frequencies plus per-source type sets.

    freq counts every token occurrence; per_source holds, for each source,
    the set of types occurring in at least one of its documents.
    per_source_docs carries document counts per source, needed by the
    ablation and growth reports.
    """

    freq: Counter = field(default_factory=Counter)
    per_source: dict[str, set[str]] = field(default_factory=dict)
    per_source_docs: dict[str, int] = field(default_factory=dict)
    total_tokens: int = 0
    total_docs: int = 0

    @property
    def vocab_size(self) -> int:
        return len(self.freq)

    def validate(self) -> None:
        if sum(self.freq.values()) != self.total_tokens:
            raise AssertionError("freq values do not sum to total_tokens")
        union: set[str] = set()
        for types in self.per_source.values():
            union |= types
        if union != set(self.freq):
            raise AssertionError("union of per-source type sets differs from freq keys")


def build_vocab_index(docs: Iterable[Document]) -> VocabIndex:
    """Single-pass scan of a document stream into a VocabIndex."""
    index = VocabIndex()
    freq = index.freq
    for doc in docs:
        types = index.per_source.setdefault(doc.source_id, set())
        index.per_source_docs[doc.source_id] = index.per_source_docs.get(doc.source_id, 0) + 1
        index.total_docs += 1
        tokens = tokenize(doc.text)
        index.total_tokens += len(tokens)
        freq.update(tokens)
        types.update(tokens)
    return index


def merge_vocab_indexes(parts: Iterable[VocabIndex]) -> VocabIndex:
    """Merge indexes built over disjoint input partitions."""
    merged = VocabIndex()
    for part in parts:
        merged.freq.update(part.freq)
        for source, types in part.per_source.items():
            merged.per_source.setdefault(source, set()).update(types)
        for source, docs in part.per_source_docs.items():
            merged.per_source_docs[source] = merged.per_source_docs.get(source, 0) + docs
        merged.total_tokens += part.total_tokens
        merged.total_docs += part.total_docs
    return merged


@dataclass(frozen=True)
class ZipfFit:
    alpha: float
    r_squared: float
    n_ranks: int
    intercept: float


def zipf_fit(index: VocabIndex, top_k: int = 100_000) -> ZipfFit:
    """Ordinary least squares on (log rank, log frequency) over the top ranks.

    Types are ranked by descending frequency, ties broken lexicographically
    for determinism. alpha is the negated slope; the intercept is stored in
    natural-log space.
    """
    ranked = sorted(index.freq.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    if len(ranked) < 2:
        raise DegenerateFitError("degenerate fit: need at least 2 ranked types")
    xs = []
    ys = []
    for rank, (word, count) in enumerate(ranked, start=1):
        if count <= 0:
            raise DegenerateFitError(f"degenerate fit: non-positive frequency for {word!r}")
        xs.append(math.log(rank))
        ys.append(math.log(count))
    n = len(xs)
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    sxx = math.fsum((x - mean_x) ** 2 for x in xs)
    sxy = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    ss_res = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    ss_tot = math.fsum((y - mean_y) ** 2 for y in ys)
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ZipfFit(alpha=-slope, r_squared=r_squared, n_ranks=n, intercept=intercept)


def vocab_growth_curve(
    index: VocabIndex, doc_counts: Mapping[str, int]
) -> list[tuple[str, int]]:
    """Cumulative vocabulary as sources are added in descending document
    count (ties broken by name). Entry i is the union size over the first
    i+1 sources; the final entry equals the total vocabulary."""
    for source in index.per_source:
        if source not in doc_counts:
            raise AnalyticsError(f"unknown source in doc_counts: {source!r} missing")
    order = sorted(index.per_source, key=lambda s: (-doc_counts[s], s))
    curve: list[tuple[str, int]] = []
    seen: set[str] = set()
    for source in order:
        seen |= index.per_source[source]
        curve.append((source, len(seen)))
    return curve


def marginal_vocab_table(index: VocabIndex) -> dict[str, int]:
    """Per-source count of types occurring in no other source."""
    membership = Counter()
    for types in index.per_source.values():
        membership.update(types)
    return {
        source: sum(1 for t in types if membership[t] == 1)
        for source, types in index.per_source.items()
    }


def marginal_vocab(index: VocabIndex, source: str) -> int:
    """Count of types occurring only in ``source``."""
    if source not in index.per_source:
        raise AnalyticsError(f"unknown source: {source!r}")
    return marginal_vocab_table(index)[source]


@dataclass(frozen=True)
class AblationRow:
    group: str
    docs_removed: int
    vocab_remaining: int
    vocab_lost_fraction: float
    coverage_after: float


FULL_CORPUS_LABEL = "full_corpus"


def leave_one_out(
    index: VocabIndex,
    groups: Mapping[str, Set[str]],
    external_tokens: Set[str],
) -> list[AblationRow]:
    """Recompute vocabulary and external-token coverage with each source
    group excluded in turn.

    Groups must partition the index's sources. The first row is the
    full-corpus baseline; the rest are sorted by vocabulary lost, largest
    first (ties by group label).
    """
    if not external_tokens:
        raise AnalyticsError("external token set is empty")
    assigned: dict[str, str] = {}
    for label, sources in groups.items():
        for source in sources:
            if source in assigned:
                raise AnalyticsError(
                    f"source {source!r} appears in groups {assigned[source]!r} and {label!r}"
                )
            if source not in index.per_source:
                raise AnalyticsError(f"group {label!r} names unknown source {source!r}")
            assigned[source] = label
    unassigned = sorted(set(index.per_source) - set(assigned))
    if unassigned:
        raise AnalyticsError(f"sources not covered by any group: {', '.join(unassigned)}")

    vocab_full = set(index.freq)
    n_external = len(external_tokens)

    def cov(vocab: Set[str]) -> float:
        return sum(1 for t in external_tokens if t in vocab) / n_external

    rows = [
        AblationRow(
            group=FULL_CORPUS_LABEL,
            docs_removed=0,
            vocab_remaining=len(vocab_full),
            vocab_lost_fraction=0.0,
            coverage_after=cov(vocab_full),
        )
    ]
    group_rows = []
    for label, sources in groups.items():
        remaining: set[str] = set()
        for source, types in index.per_source.items():
            if source not in sources:
                remaining |= types
        docs_removed = sum(index.per_source_docs.get(s, 0) for s in sources)
        group_rows.append(
            AblationRow(
                group=label,
                docs_removed=docs_removed,
                vocab_remaining=len(remaining),
                vocab_lost_fraction=1.0 - len(remaining) / len(vocab_full) if vocab_full else 0.0,
                coverage_after=cov(remaining),
            )
        )
    group_rows.sort(key=lambda r: (r.vocab_remaining, r.group))
    return rows + group_rows


@dataclass(frozen=True)
class CoverageRow:
    label: str
    covered: int
    total: int
    fraction: float


@dataclass(frozen=True)
class CoverageReport:
    rows: tuple[CoverageRow, ...]


def coverage(
    index: VocabIndex, token_sets: Sequence[tuple[str, Set[str]]]
) -> CoverageReport:
    """Per-category coverage of external token sets by the corpus vocabulary.

    Matching is exact surface-form equality on whitespace tokens; no
    normalization is applied.
    """
    vocab = index.freq
    rows = []
    for label, tokens in token_sets:
        if not tokens:
            raise AnalyticsError(f"empty token set for category {label!r}")
        covered = sum(1 for t in tokens if t in vocab)
        rows.append(CoverageRow(label=label, covered=covered, total=len(tokens), fraction=covered / len(tokens)))
    return CoverageReport(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Persistence: {stem}.vocab.tsv (type TAB frequency, sorted by descending
# frequency then type), {stem}.sources.tsv (source TAB type, both sorted),
# {stem}.meta.json (doc/token totals). Types never contain a tab: tab is
# whitespace, and tokens are whitespace-free by construction.


def save_index(index: VocabIndex, stem: Path | str) -> list[Path]:
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    vocab_path = stem.with_name(stem.name + ".vocab.tsv")
    sources_path = stem.with_name(stem.name + ".sources.tsv")
    meta_path = stem.with_name(stem.name + ".meta.json")

    with open(vocab_path, "w", encoding="utf-8") as handle:
        for word, count in sorted(index.freq.items(), key=lambda kv: (-kv[1], kv[0])):
            handle.write(f"{word}\t{count}\n")
    with open(sources_path, "w", encoding="utf-8") as handle:
        for source in sorted(index.per_source):
            for word in sorted(index.per_source[source]):
                handle.write(f"{source}\t{word}\n")
    meta = {
        "schema_version": META_SCHEMA_VERSION,
        "total_docs": index.total_docs,
        "total_tokens": index.total_tokens,
        "per_source_docs": {s: index.per_source_docs[s] for s in sorted(index.per_source_docs)},
    }
    with open(meta_path, "w", encoding="utf-8") as handle:
        json.dump(meta, handle, ensure_ascii=False, indent=2)
        handle.write("\n")
    return [vocab_path, sources_path, meta_path]


def load_index(stem: Path | str) -> VocabIndex:
    stem = Path(stem)
    vocab_path = stem.with_name(stem.name + ".vocab.tsv")
    sources_path = stem.with_name(stem.name + ".sources.tsv")
    meta_path = stem.with_name(stem.name + ".meta.json")
    for path in (vocab_path, sources_path, meta_path):
        if not path.is_file():
            raise AnalyticsError(f"index file missing: {path}")

    index = VocabIndex()
    with open(vocab_path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            word, _, count = line.rpartition("\t")
            index.freq[word] = int(count)
    with open(sources_path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            source, _, word = line.partition("\t")
            index.per_source.setdefault(source, set()).add(word)
    with open(meta_path, encoding="utf-8") as handle:
        meta = json.load(handle)
    index.total_docs = meta["total_docs"]
    index.total_tokens = meta["total_tokens"]
    index.per_source_docs = dict(meta["per_source_docs"])
    return index


def load_token_sets(path: Path | str) -> list[tuple[str, set[str]]]:
    """Read a two-column 'category TAB token' file into ordered categories."""
    sets: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            category, sep, token = line.partition("\t")
            if not sep or not category or not token:
                raise AnalyticsError(f"{path}:{lineno}: expected 'category<TAB>token'")
            sets.setdefault(category, set()).add(token)
    return list(sets.items())


def load_groups(path: Path | str) -> dict[str, set[str]]:
    """Read a two-column 'group TAB source' file."""
    groups: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            group, sep, source = line.partition("\t")
            if not sep or not group or not source:
                raise AnalyticsError(f"{path}:{lineno}: expected 'group<TAB>source'")
            groups.setdefault(group, set()).add(source)
    return groups
