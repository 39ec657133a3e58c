"""corpuskit: streaming corpus construction and analysis toolkit."""

__version__ = "0.1.0"

from .core import (
    BUILTIN_PROFILES,
    PASHTO_PROFILE,
    Document,
    ScriptProfile,
    SourceSpec,
    content_hash,
    normalize_for_hash,
    tokenize,
)

__all__ = [
    "__version__",
    "BUILTIN_PROFILES",
    "PASHTO_PROFILE",
    "Document",
    "ScriptProfile",
    "SourceSpec",
    "content_hash",
    "normalize_for_hash",
    "tokenize",
]
