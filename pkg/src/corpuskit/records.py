"""Line-delimited document records.

One JSON object per line, UTF-8. Input fields: {id, source, url?, title?,
text, fetched_at?}. Pipeline output shards carry the same fields plus
{script_ratio, token_count, content_hash}. Text newlines are escaped by the
JSON encoding, so a record never spans lines. Unknown fields are ignored on
read so shards can be re-ingested.
"""

from __future__ import annotations

import gzip
import io
import json
from collections.abc import Callable, Iterable, Iterator, Mapping
from pathlib import Path
from typing import IO

from .core import Document

_OPTIONAL_FIELDS = ("url", "title", "fetched_at")


class RecordError(ValueError):
    """A single malformed input line (bad UTF-8, bad JSON, or bad fields)."""


def parse_record(line: bytes | str) -> Document:
    """Parse one serialized record into a Document.

    Raises RecordError on invalid UTF-8, invalid JSON, a non-object record,
    or missing/ill-typed fields.
    """
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise RecordError(f"invalid UTF-8: {exc}") from exc
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise RecordError(f"record is not an object: {type(obj).__name__}")

    doc_id = obj.get("id")
    source = obj.get("source")
    text = obj.get("text")
    if not isinstance(doc_id, str) or not doc_id:
        raise RecordError("missing or empty 'id'")
    if not isinstance(source, str) or not source:
        raise RecordError("missing or empty 'source'")
    if not isinstance(text, str):
        raise RecordError("missing 'text'")
    optitems = {}
    for name in _OPTIONAL_FIELDS:
        value = obj.get(name)
        if value is not None and not isinstance(value, str):
            raise RecordError(f"field {name!r} must be a string")
        optitems[name] = value
    return Document(id=doc_id, source_id=source, text=text, **optitems)


def encode_record(doc: Document, extra: Mapping[str, object] | None = None) -> str:
    """Serialize a Document (plus optional added fields) to one JSON line.

    Field order is fixed so deterministic runs yield byte-identical output.
    """
    obj: dict[str, object] = {"id": doc.id, "source": doc.source_id}
    if doc.url is not None:
        obj["url"] = doc.url
    if doc.title is not None:
        obj["title"] = doc.title
    obj["text"] = doc.text
    if doc.fetched_at is not None:
        obj["fetched_at"] = doc.fetched_at
    if extra:
        obj.update(extra)
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def open_text(path: Path | str, mode: str = "rb") -> IO:
    """Open a record file, transparently handling .gz suffixes.

    Gzip writes carry mtime=0 so identical content compresses to identical
    bytes across runs.
    """
    path = Path(path)
    if path.suffix == ".gz":
        if "w" in mode:
            handle = gzip.GzipFile(path, "wb", mtime=0)
            return handle if "b" in mode else io.TextIOWrapper(handle, encoding="utf-8")
        if "b" in mode:
            return gzip.open(path, mode)
        return gzip.open(path, mode, encoding="utf-8")
    if "b" in mode:
        return open(path, mode)
    return open(path, mode, encoding="utf-8")


def read_documents(
    path: Path | str,
    on_error: Callable[[int, RecordError], None] | None = None,
) -> Iterator[Document]:
    """Stream Documents from a record file.

    Malformed lines never abort the stream: each one is reported through
    ``on_error(lineno, exc)`` (lineno is 1-based) and skipped. Blank lines are
    ignored.
    """
    with open_text(path, "rb") as handle:
        for lineno, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                yield parse_record(raw)
            except RecordError as exc:
                if on_error is not None:
                    on_error(lineno, exc)


def write_documents(path: Path | str, docs: Iterable[Document]) -> int:
    """Write documents to ``path`` in the input record format; returns count."""
    path = Path(path)
    count = 0
    with open_text(path, "wt") as handle:
        for doc in docs:
            handle.write(encode_record(doc))
            handle.write("\n")
            count += 1
    return count
