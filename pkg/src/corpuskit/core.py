"""Domain types plus tokenization and content normalization.

Everything here is pure and immutable; the functions are safe to call from
any number of workers without coordination.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from bisect import bisect_right
from dataclasses import dataclass, field

# Code points carrying the Unicode White_Space property (PropList.txt).
# Deliberately not str.isspace(): Python additionally accepts U+001C..U+001F,
# which are not White_Space.
_WHITE_SPACE_CODEPOINTS = (
    tuple(range(0x0009, 0x000E))  # TAB, LF, VT, FF, CR
    + (0x0020, 0x0085, 0x00A0, 0x1680)
    + tuple(range(0x2000, 0x200B))  # EN QUAD .. HAIR SPACE
    + (0x2028, 0x2029, 0x202F, 0x205F, 0x3000)
)
_WS_RUN = re.compile("[%s]+" % "".join(map(chr, _WHITE_SPACE_CODEPOINTS)))

# str.lower() applies two non-simple mappings: U+0130 expands to "i" plus a
# combining dot, and U+03A3 is context-sensitive (final sigma). Translating
# both first yields a per-code-point simple lowercase with no locale tailoring.
_SIMPLE_LOWER_OVERRIDES = {0x0130: "i", 0x03A3: chr(0x03C3)}

SOURCE_CATEGORIES = (
    "web_crawl",
    "news_radio",
    "afghan_news",
    "aggregator_blog",
    "pdf_books",
    "encyclopedia",
    "parallel_translation",
    "other",
)
SOURCE_KINDS = ("dump", "crawl")

# Source names appear in shard filenames and TSV sidecars.
_SOURCE_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


@dataclass(frozen=True, slots=True)
class Document:
    """One text unit flowing through the pipeline.

    ``id`` must be non-empty and unique within a pipeline run; ``text`` is
    enforced to be valid UTF-8 at ingest. ``fetched_at`` is an ISO-8601 UTC
    timestamp when present.
    """

    id: str
    source_id: str
    text: str
    url: str | None = None
    title: str | None = None
    fetched_at: str | None = None


@dataclass(frozen=True)
class SourceSpec:
    """A registered corpus source: a name, one of the eight categories, and
    whether its documents come from a dump file or a crawl."""

    name: str
    category: str
    kind: str

    def __post_init__(self) -> None:
        if not _SOURCE_NAME.match(self.name):
            raise ValueError(f"invalid source name: {self.name!r}")
        if self.category not in SOURCE_CATEGORIES:
            raise ValueError(
                f"unknown category {self.category!r} for source {self.name!r}; "
                f"expected one of {', '.join(SOURCE_CATEGORIES)}"
            )
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r} for source {self.name!r}")


@dataclass(frozen=True)
class ScriptProfile:
    """A named set of inclusive Unicode code-point ranges defining a script.

    Ranges must be sorted by low end and non-overlapping.
    """

    name: str
    ranges: tuple[tuple[int, int], ...]
    _char_class: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranges", tuple((int(lo), int(hi)) for lo, hi in self.ranges))
        prev_hi = -1
        for lo, hi in self.ranges:
            if lo > hi:
                raise ValueError(f"profile {self.name!r}: range U+{lo:04X}..U+{hi:04X} has lo > hi")
            if lo <= prev_hi:
                raise ValueError(f"profile {self.name!r}: ranges overlap or are unsorted at U+{lo:04X}")
            prev_hi = hi
        object.__setattr__(self, "_lows", tuple(lo for lo, _ in self.ranges))

    def contains(self, codepoint: int) -> bool:
        i = bisect_right(self._lows, codepoint) - 1
        return i >= 0 and codepoint <= self.ranges[i][1]

    def classify_char(self, ch: str) -> int:
        """1 = letter inside the profile, 0 = letter outside, -1 = not a letter.

        Memoized per profile; corpus alphabets are small so the cache stays hot.
        """
        cls = self._char_class.get(ch)
        if cls is None:
            if unicodedata.category(ch).startswith("L"):
                cls = 1 if self.contains(ord(ch)) else 0
            else:
                cls = -1
            self._char_class[ch] = cls
        return cls


# Arabic-script blocks: base block plus Supplement, Extended-A, and both
# Presentation Forms blocks. Fully overridable through configuration.
PASHTO_PROFILE = ScriptProfile(
    name="pashto",
    ranges=(
        (0x0600, 0x06FF),
        (0x0750, 0x077F),
        (0x08A0, 0x08FF),
        (0xFB50, 0xFDFF),
        (0xFE70, 0xFEFF),
    ),
)

BUILTIN_PROFILES = {PASHTO_PROFILE.name: PASHTO_PROFILE}


def tokenize(text: str) -> list[str]:
    """Split text into maximal runs of non-whitespace code points.

    Splitting happens on any code point with the Unicode White_Space property;
    empty strings are never returned. ZWNJ (U+200C) is not whitespace and does
    not split a token.
    """
    return [t for t in _WS_RUN.split(text) if t]


def normalize_for_hash(text: str) -> str:
    """Canonical form for content hashing: simple-lowercase every code point,
    collapse each whitespace run to one ASCII space, strip the ends.

    Idempotent, and preserves the token count of the input.
    """
    if chr(0x0130) in text or chr(0x03A3) in text:
        text = text.translate(_SIMPLE_LOWER_OVERRIDES)
    return " ".join(tokenize(text.lower()))


def content_hash(text: str) -> bytes:
    """SHA-256 digest of the UTF-8 encoding of ``text``.

    Callers are expected to pass text already normalized via
    :func:`normalize_for_hash`; the digest is rendered as 64 lowercase hex
    characters at serialization boundaries (``.hex()``).
    """
    return hashlib.sha256(text.encode("utf-8")).digest()
