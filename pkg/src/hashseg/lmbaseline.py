"""Frequency-based baseline segmenter.

Scores a candidate segmentation w_1 .. w_n as

    log p(w_1) + sum_i log p(w_i | w_{i-1})

where p(w | prev) = f(prev, w) / f(prev) when the bigram was observed
and otherwise backs off to the Laplace-smoothed unigram

    p(w) = (f(w) + alpha) / (total_tokens + alpha * |V|).

A pure-unigram scoring mode (sum of smoothed unigram log-probs) is
available via ``unigram_only``.  The best segmentation is found by
dynamic programming over all word boundaries, which is exactly
equivalent to scoring every one of the 2^(n-1) splits.  Underscores in
the input force boundaries and are removed from the output words.

Degenerate empty tables define every probability as 1, so the search
falls back to the tie-breaking rule: fewer words first, lexicographic
word order second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SegmentationHypothesis:
    words: tuple
    log_score: float


def unigram_logprob(table, word):
    """Smoothed unigram log-probability; 0.0 for a degenerate empty table."""
    if table.vocab_size == 0:
        return 0.0
    freq = table.unigram_freq.get(word, 0)
    return math.log(
        (freq + table.alpha) / (table.total_tokens + table.alpha * table.vocab_size)
    )


def bigram_logprob(table, prev, word):
    """Conditional bigram log-probability with unigram fallback."""
    pair_freq = table.bigram_freq.get((prev, word), 0)
    if pair_freq > 0:
        return math.log(pair_freq / table.unigram_freq[prev])
    return unigram_logprob(table, word)


def score_segmentation(table, words, unigram_only=False):
    """Log-score of a word sequence, accumulated left to right."""
    score = 0.0
    prev = None
    for word in words:
        if prev is None or unigram_only:
            score += unigram_logprob(table, word)
        else:
            score += bigram_logprob(table, prev, word)
        prev = word
    return score


def normalize_input(text):
    """Lowercase, drop underscores, and return forced cut positions.

    A forced position p means the segmentation must have a boundary
    between cleaned[p-1] and cleaned[p]; positions at the very start or
    end are vacuous and omitted.
    """
    cleaned = []
    forced = set()
    for ch in text.lower():
        if ch == "_":
            forced.add(len(cleaned))
        else:
            cleaned.append(ch)
    forced.discard(0)
    forced.discard(len(cleaned))
    return "".join(cleaned), forced


def _better(a, b):
    """True when hypothesis tuple a = (score, words) beats b."""
    if b is None:
        return True
    if a[0] != b[0]:
        return a[0] > b[0]
    if len(a[1]) != len(b[1]):
        return len(a[1]) < len(b[1])
    return a[1] < b[1]


def segment_dp(table, text, max_word_len=20, unigram_only=False):
    """Best-scoring segmentation of `text` under the table's LM.

    Every word is at most `max_word_len` characters and never spans a
    forced (underscore) boundary.  Ties break toward fewer words, then
    lexicographically smaller word sequences.
    """
    if max_word_len < 1:
        raise ValueError("max_word_len must be >= 1")
    s, forced = normalize_input(text)
    n = len(s)
    if n == 0:
        raise ValueError("input is empty after underscore normalization")

    # best[j][i] = best (score, words) for s[:j] whose last word is s[i:j]
    best = [dict() for _ in range(n + 1)]
    for j in range(1, n + 1):
        for i in range(max(0, j - max_word_len), j):
            if any(i < p < j for p in forced):
                continue
            word = s[i:j]
            if i == 0:
                candidate = (unigram_logprob(table, word), (word,))
                if _better(candidate, best[j].get(i)):
                    best[j][i] = candidate
                continue
            for prev_start, (prev_score, prev_words) in best[i].items():
                prev_word = s[prev_start:i]
                if unigram_only:
                    step = unigram_logprob(table, word)
                else:
                    step = bigram_logprob(table, prev_word, word)
                candidate = (prev_score + step, prev_words + (word,))
                if _better(candidate, best[j].get(i)):
                    best[j][i] = candidate

    winner = None
    for candidate in best[n].values():
        if _better(candidate, winner):
            winner = candidate
    return SegmentationHypothesis(words=winner[1], log_score=winner[0])
