#!/usr/bin/env python3
"""Single-worker throughput benchmark for the three filter stages.

    python scripts/bench_filters.py --docs 50000 --doc-bytes 1000
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from corpuskit.core import Document, content_hash, normalize_for_hash
from corpuskit.filters import DedupIndex, LangIdConfig, langid_filter, min_token_filter

ARABIC_LETTERS = "ابتثجحخدذرزسشصضطظعغفقکگلمنوهيې"
LATIN_WORDS = ["NATO", "UNICEF", "Kabul", "report"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--docs", type=int, default=50_000)
    parser.add_argument("--doc-bytes", type=int, default=1_000)
    parser.add_argument("--seed", type=int, default=99)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    vocab = ["".join(rng.choice(ARABIC_LETTERS) for _ in range(rng.randint(3, 9))) for _ in range(4000)]

    def make_text() -> str:
        parts, size = [], 0
        while size < args.doc_bytes:
            word = rng.choice(vocab) if rng.random() > 0.05 else rng.choice(LATIN_WORDS)
            parts.append(word)
            size += len(word.encode("utf-8")) + 1
        return " ".join(parts)

    docs = [Document(id=f"b{i}", source_id="bench", text=make_text()) for i in range(args.docs)]
    avg = sum(len(d.text.encode("utf-8")) for d in docs) / len(docs)
    print(f"{args.docs:,} docs, avg {avg:.0f} bytes")

    config = LangIdConfig()
    index = DedupIndex()
    counts = {"langid": 0, "dedup": 0, "min_tokens": 0, "kept": 0}
    started = time.perf_counter()
    for doc in docs:
        if not langid_filter(doc, config).keep:
            counts["langid"] += 1
            continue
        if not index.check_and_insert(content_hash(normalize_for_hash(doc.text))):
            counts["dedup"] += 1
            continue
        if not min_token_filter(doc, 10).keep:
            counts["min_tokens"] += 1
            continue
        counts["kept"] += 1
    elapsed = time.perf_counter() - started

    print(f"removed: {counts['langid']} langid, {counts['dedup']} dedup, {counts['min_tokens']} min_tokens")
    print(f"kept {counts['kept']:,} in {elapsed:.2f}s")
    print(f"{args.docs / elapsed:,.0f} docs/s = {60 * args.docs / elapsed:,.0f} docs/min (single worker)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
