#!/usr/bin/env python3
"""Regenerate the bundled demo corpus (data/corpus_en.txt).

The corpus is synthetic social-media-style English: short lines built
from weighted word pools and fixed collocations, so frequent unigrams,
bigrams, and trigrams exist by construction.  Everything is generated
by this script from the word lists below; the output is dedicated to
the public domain (see data/README.md).

Usage:
    python3 scripts/build_corpus.py data/corpus_en.txt --lines 7600 --seed 20160301
"""

import argparse

from hashseg.rng import Rng

# chunks are emitted whole, so every multiword chunk becomes a stable
# bigram/trigram in the output
CHUNKS = [
    # weight, words
    (30, "summer party"),
    (28, "beach day"),
    (26, "music festival"),
    (24, "good morning"),
    (24, "happy friday"),
    (22, "road trip"),
    (22, "game night"),
    (20, "coffee break"),
    (20, "movie night"),
    (18, "best friends"),
    (18, "city lights"),
    (16, "winter storm"),
    (16, "spring break"),
    (16, "street food"),
    (14, "live music"),
    (14, "family dinner"),
    (14, "super bowl"),
    (12, "happy hour"),
    (12, "book club"),
    (12, "art show"),
    (10, "lake house"),
    (10, "night sky"),
    (10, "home team"),
    (8, "long weekend"),
    (8, "open mic"),
    (20, "summer party time"),
    (16, "beach day fun"),
    (14, "music festival tonight"),
    (12, "good morning world"),
    (12, "road trip vibes"),
    (10, "game night crew"),
    (10, "movie night again"),
    (8, "city lights tonight"),
]

WORDS = [
    (60, "love"), (55, "fun"), (50, "great"), (45, "today"), (42, "time"),
    (40, "weekend"), (38, "friends"), (36, "happy"), (34, "best"), (32, "night"),
    (30, "summer"), (30, "music"), (28, "beach"), (28, "party"), (26, "home"),
    (24, "sun"), (24, "game"), (22, "food"), (22, "photo"), (20, "dance"),
    (20, "travel"), (18, "coffee"), (18, "rain"), (16, "snow"), (16, "winter"),
    (16, "dream"), (14, "style"), (14, "art"), (14, "team"), (12, "smile"),
    (12, "light"), (12, "crazy"), (12, "sweet"), (10, "lucky"), (10, "magic"),
    (10, "fresh"), (10, "gold"), (8, "wild"), (8, "blue"), (8, "proud"),
    (8, "race"), (6, "storm"), (6, "river"), (6, "coast"), (6, "stars"),
]

FILLERS = [
    (50, "the"), (35, "a"), (30, "and"), (25, "at"), (25, "in"), (20, "on"),
    (20, "with"), (18, "for"), (15, "is"), (15, "was"), (12, "we"), (12, "my"),
    (10, "so"), (10, "all"), (8, "this"), (8, "of"), (6, "to"), (6, "our"),
]

OPENERS = [
    (20, "loving"), (18, "enjoying"), (16, "finally"), (14, "celebrating"),
    (12, "missing"), (10, "watching"), (10, "waiting for"), (8, "back at"),
    (8, "ready for"), (6, "dreaming of"),
]


def _cumulative(pool):
    items = []
    weights = []
    running = 0.0
    for weight, text in pool:
        running += weight
        items.append(text)
        weights.append(running)
    return items, weights


def _pick(rng, items, cum):
    return items[rng.weighted_index(cum)]


def build_line(rng) -> str:
    parts = []
    if rng.random() < 0.35:
        parts.append(_pick(rng, *_POOLS["openers"]))
    n_chunks = 2 + rng.randint(3)  # 2..4 chunks per line
    for i in range(n_chunks):
        if i > 0 and rng.random() < 0.6:
            parts.append(_pick(rng, *_POOLS["fillers"]))
        if rng.random() < 0.55:
            parts.append(_pick(rng, *_POOLS["chunks"]))
        else:
            parts.append(_pick(rng, *_POOLS["words"]))
    if rng.random() < 0.30:
        parts.append(_pick(rng, *_POOLS["words"]))
    if rng.random() < 0.12:
        parts.append(str(2010 + rng.randint(10)))
    return " ".join(parts)


_POOLS = {
    "chunks": _cumulative(CHUNKS),
    "words": _cumulative(WORDS),
    "fillers": _cumulative(FILLERS),
    "openers": _cumulative(OPENERS),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", help="corpus file to write")
    ap.add_argument("--lines", type=int, default=7600)
    ap.add_argument("--seed", type=int, default=20160301)
    args = ap.parse_args()

    rng = Rng(args.seed)
    tokens = 0
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for _ in range(args.lines):
            line = build_line(rng)
            tokens += line.count(" ") + 1
            fh.write(line + "\n")
    print(f"wrote {args.lines} lines, {tokens} tokens to {args.out}")


if __name__ == "__main__":
    main()
