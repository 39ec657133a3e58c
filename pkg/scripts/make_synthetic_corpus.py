#!/usr/bin/env python3
"""Generate a seeded synthetic multi-source corpus plus a ready-to-run
config file, for demoing the toolkit offline.

    python scripts/make_synthetic_corpus.py demo/ --docs 5000 --seed 7
    corpuskit --config demo/corpus.toml pipeline
    corpuskit --output-dir demo/out stats demo/out/*.jsonl --zipf --growth --marginal
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

ARABIC_LETTERS = "ابتثجحخدذرزسشصضطظعغفقکگلمنوهيېۍ"
LATIN_WORDS = ["NATO", "UNICEF", "Kabul", "radio", "BBC", "report"]

SOURCES = {
    "webdump": ("web_crawl", 0.55),
    "newsradio": ("news_radio", 0.30),
    "books": ("pdf_books", 0.10),
    "wiki": ("encyclopedia", 0.05),
}


def build_vocab(rng: random.Random, size: int) -> list[str]:
    words = set()
    while len(words) < size:
        words.add("".join(rng.choice(ARABIC_LETTERS) for _ in range(rng.randint(3, 9))))
    return sorted(words)


def sample_text(rng: random.Random, vocab: list[str], n_tokens: int) -> str:
    # Zipf-ish draw: quadratic skew toward the front of the vocabulary
    words = [vocab[int(len(vocab) * rng.random() ** 2.5)] for _ in range(n_tokens)]
    if rng.random() < 0.15:
        words[rng.randrange(len(words))] = rng.choice(LATIN_WORDS)
    return " ".join(words)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--docs", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--dup-rate", type=float, default=0.08, help="fraction of planted duplicates")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    vocab = build_vocab(rng, 8000)

    # books get a private vocabulary slice so the ablation has something to find
    book_vocab = build_vocab(random.Random(args.seed + 1), 3000)

    handles = {name: open(args.out_dir / f"{name}.jsonl", "w", encoding="utf-8") for name in SOURCES}
    names = list(SOURCES)
    weights = [SOURCES[n][1] for n in names]
    earlier: list[str] = []
    for i in range(args.docs):
        source = rng.choices(names, weights)[0]
        roll = rng.random()
        if earlier and roll < args.dup_rate:
            text = earlier[rng.randrange(len(earlier))]
        elif roll < args.dup_rate + 0.05:
            text = "english boilerplate text " * rng.randint(2, 5)
        elif roll < args.dup_rate + 0.08:
            text = sample_text(rng, vocab, rng.randint(2, 9))
        else:
            pool = book_vocab if source == "books" else vocab
            text = sample_text(rng, pool, rng.randint(15, 120))
            earlier.append(text)
        record = {"id": f"{source}-{i:06d}", "source": source, "text": text}
        handles[source].write(json.dumps(record, ensure_ascii=False) + "\n")
    for handle in handles.values():
        handle.close()

    lines = ["[pipeline]", 'output_dir = "out"', "shard_max_docs = 2000", ""]
    for name, (category, _) in SOURCES.items():
        lines += [f"[source.{name}]", f'category = "{category}"', 'kind = "dump"',
                  f'input = "{name}.jsonl"', ""]
    (args.out_dir / "corpus.toml").write_text("\n".join(lines), encoding="utf-8")

    groups = {"web": ["webdump"], "broadcast": ["newsradio"], "reference": ["books", "wiki"]}
    with open(args.out_dir / "groups.tsv", "w", encoding="utf-8") as handle:
        for label, members in groups.items():
            for member in members:
                handle.write(f"{label}\t{member}\n")
    with open(args.out_dir / "tokens.tsv", "w", encoding="utf-8") as handle:
        for token in rng.sample(vocab, 200):
            handle.write(f"CHECK\t{token}\n")

    print(f"wrote {args.docs} docs across {len(SOURCES)} sources under {args.out_dir}/")
    print(f"next: corpuskit --config {args.out_dir / 'corpus.toml'} pipeline")
    return 0


if __name__ == "__main__":
    sys.exit(main())
