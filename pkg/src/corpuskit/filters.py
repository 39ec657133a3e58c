"""The three pipeline filter stages: script-based language identification,
exact content deduplication, and minimum-length quality filtering.

Each stage is an independently testable predicate returning a
:class:`FilterDecision`. ``langid`` and ``min_tokens`` are pure;
``dedup`` mutates a shared :class:`DedupIndex` with atomic
check-and-insert semantics (a single consumer in deterministic mode).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Document, ScriptProfile, PASHTO_PROFILE, content_hash, normalize_for_hash, tokenize

KEEP = "keep"
REJECT = "reject"

STAGE_LANGID = "langid"
STAGE_DEDUP = "dedup"
STAGE_MIN_TOKENS = "min_tokens"

IN_SCRIPT = "in_script"
OUT_OF_SCRIPT = "out_of_script"
NEUTRAL = "neutral"


@dataclass(frozen=True, slots=True)
class FilterDecision:
    """Stable record of one stage's verdict on one document.

    ``detail`` is the script ratio for langid, the token count for
    min_tokens, and absent for dedup.
    """

    verdict: str
    stage: str
    detail: float | int | None = None

    @property
    def keep(self) -> bool:
        return self.verdict == KEEP


@dataclass
class LangIdConfig:
    profile: ScriptProfile = PASHTO_PROFILE
    min_ratio: float = 0.70
    token_membership_threshold: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_ratio <= 1.0:
            raise ValueError(f"min_ratio must be in [0, 1], got {self.min_ratio}")
        if not 0.0 <= self.token_membership_threshold <= 1.0:
            raise ValueError(
                f"token_membership_threshold must be in [0, 1], got {self.token_membership_threshold}"
            )


class DedupIndex:
    """Set of 256-bit content digests with check-and-insert semantics."""

    __slots__ = ("digests",)

    def __init__(self) -> None:
        self.digests: set[bytes] = set()

    @property
    def inserted_count(self) -> int:
        return len(self.digests)

    def check_and_insert(self, digest: bytes) -> bool:
        """Insert ``digest`` and return True iff it was not already present."""
        if digest in self.digests:
            return False
        self.digests.add(digest)
        return True


def _classify_token(token: str, profile: ScriptProfile, threshold: float) -> str:
    letters = 0
    in_profile = 0
    classify = profile.classify_char
    for ch in token:
        cls = classify(ch)
        if cls >= 0:
            letters += 1
            in_profile += cls
    if letters == 0:
        return NEUTRAL
    return IN_SCRIPT if in_profile >= threshold * letters else OUT_OF_SCRIPT


# Word frequencies are Zipf-distributed, so a bounded per-token memo turns
# most classifications into one dict hit. Keyed per (profile, threshold).
_token_memo: dict[tuple[ScriptProfile, float], dict[str, str]] = {}
_TOKEN_MEMO_MAX = 1 << 17


def _memo_for(profile: ScriptProfile, threshold: float) -> dict[str, str]:
    if len(_token_memo) > 64:
        _token_memo.clear()
    return _token_memo.setdefault((profile, threshold), {})


def token_script_class(token: str, profile: ScriptProfile, threshold: float = 0.5) -> str:
    """Classify one token against a script profile.

    Neutral iff the token has no letter code points (digits/punctuation only);
    otherwise in-script iff the fraction of its letter code points inside the
    profile ranges is >= ``threshold``.
    """
    if not token:
        raise ValueError("token_script_class: empty token")
    memo = _memo_for(profile, threshold)
    cls = memo.get(token)
    if cls is None:
        cls = _classify_token(token, profile, threshold)
        if len(memo) >= _TOKEN_MEMO_MAX:
            memo.clear()
        memo[token] = cls
    return cls


def script_ratio(tokens: list[str], config: LangIdConfig) -> float:
    """Fraction of non-neutral tokens classified in-script; 0.0 when all
    tokens are neutral or the list is empty."""
    in_script = 0
    scored = 0
    profile = config.profile
    threshold = config.token_membership_threshold
    memo = _memo_for(profile, threshold)
    memo_get = memo.get
    for token in tokens:
        cls = memo_get(token)
        if cls is None:
            cls = _classify_token(token, profile, threshold)
            if len(memo) >= _TOKEN_MEMO_MAX:
                memo.clear()
            memo[token] = cls
        if cls == NEUTRAL:
            continue
        scored += 1
        if cls == IN_SCRIPT:
            in_script += 1
    if scored == 0:
        return 0.0
    return in_script / scored


def langid_filter(doc: Document, config: LangIdConfig) -> FilterDecision:
    """Keep iff the document's script ratio is >= ``config.min_ratio``.

    The boundary is inclusive: a document at exactly the minimum ratio is kept.
    """
    ratio = script_ratio(tokenize(doc.text), config)
    verdict = KEEP if ratio >= config.min_ratio else REJECT
    return FilterDecision(verdict, STAGE_LANGID, ratio)


def dedup_check(index: DedupIndex, doc: Document) -> FilterDecision:
    """Keep-first exact dedup on the normalized content hash.

    The first document carrying a given normalized text inserts its digest and
    is kept; later ones are rejected, regardless of source.
    """
    digest = content_hash(normalize_for_hash(doc.text))
    verdict = KEEP if index.check_and_insert(digest) else REJECT
    return FilterDecision(verdict, STAGE_DEDUP)


def min_token_filter(doc: Document, min_tokens: int = 10) -> FilterDecision:
    """Keep iff the whitespace token count is >= ``min_tokens``."""
    if min_tokens < 0:
        raise ValueError(f"min_tokens must be >= 0, got {min_tokens}")
    count = len(tokenize(doc.text))
    verdict = KEEP if count >= min_tokens else REJECT
    return FilterDecision(verdict, STAGE_MIN_TOKENS, count)
