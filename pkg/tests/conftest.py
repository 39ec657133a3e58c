"""Shared fixture helpers: Arabic-script word stock and corpus builders."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from corpuskit.core import Document

# Real Pashto surface forms, all code points inside U+0600..U+06FF.
PASHTO_WORDS = [
    "سلام", "نړۍ", "کتاب", "ورځ", "خبرونه", "افغانستان", "کال", "چې", "دی",
    "په", "له", "سره", "هم", "وو", "ده", "يو", "دوه", "درې", "ښوونځی",
    "پښتو", "ژبه", "ليکل", "لوستل", "کور", "ښار", "ولس", "حکومت", "وخت",
]

LATIN_WORDS = ["NATO", "UNICEF", "Kabul", "report", "BBC", "radio"]

ARABIC_LETTERS = "ابتثجحخدذرزسشصضطظعغفقکگلمنوهيېۍ"


def pashto_text(n_tokens: int, rng: random.Random | None = None) -> str:
    rng = rng or random.Random(0)
    return " ".join(rng.choice(PASHTO_WORDS) for _ in range(n_tokens))


def random_word(rng: random.Random, lo: int = 3, hi: int = 9) -> str:
    return "".join(rng.choice(ARABIC_LETTERS) for _ in range(rng.randint(lo, hi)))


def make_doc(doc_id: str, text: str, source: str = "src") -> Document:
    return Document(id=doc_id, source_id=source, text=text)


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260808)
