"""Corpus ingestion: tokenization, n-gram extraction, frequency tables.

Input corpora are UTF-8 plain text with one post per line.  Tokens are
whitespace-separated chunks with leading/trailing punctuation and symbols
stripped (internal apostrophes and hyphens are kept).  N-gram windows
never cross line boundaries.  Word case is preserved for the hashtag
generator; the language-model frequency table lowercases everything.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum


class TokenKind(Enum):
    LOWER = "lowercase-word"
    CAPITALIZED = "capitalized-word"
    UPPER = "uppercase-word"
    DIGITS = "digit-run"
    OTHER = "other"


#: token kinds allowed inside generated/extracted n-grams
WORDLIKE_KINDS = frozenset(
    {TokenKind.LOWER, TokenKind.CAPITALIZED, TokenKind.UPPER, TokenKind.DIGITS}
)


@dataclass(frozen=True)
class Token:
    surface: str
    kind: TokenKind


def classify(surface):
    """Token kind for a non-empty, whitespace-free surface string.

    Digit runs are ASCII digits only and at most four long; longer runs
    and anything mixed-case or mixed-alphanumeric classify as OTHER.
    """
    if surface.isascii() and surface.isdigit():
        return TokenKind.DIGITS if len(surface) <= 4 else TokenKind.OTHER
    letters = surface.replace("'", "").replace("’", "").replace("-", "")
    if letters and letters.isalpha():
        if letters.islower():
            return TokenKind.LOWER
        if letters.isupper():
            return TokenKind.UPPER
        if letters[0].isupper() and letters[1:].islower():
            return TokenKind.CAPITALIZED
    return TokenKind.OTHER


def _strip_edge_punctuation(chunk):
    start, end = 0, len(chunk)
    while start < end and unicodedata.category(chunk[start])[0] in "PS":
        start += 1
    while end > start and unicodedata.category(chunk[end - 1])[0] in "PS":
        end -= 1
    return chunk[start:end]


def tokenize(text):
    """Split `text` on whitespace and strip edge punctuation per chunk.

    Chunks that are pure punctuation disappear; the empty string yields
    an empty token list.
    """
    tokens = []
    for chunk in text.split():
        surface = _strip_edge_punctuation(chunk)
        if surface:
            tokens.append(Token(surface, classify(surface)))
    return tokens


def load_stopwords(path):
    """Read a stopword file: UTF-8, one lowercase word per line."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word:
                words.add(word.lower())
    return frozenset(words)


def _count_ngram_windows(token_lines, n_min, n_max):
    counts = Counter()
    for tokens in token_lines:
        for n in range(n_min, n_max + 1):
            for start in range(len(tokens) - n + 1):
                counts[tuple(tokens[start : start + n])] += 1
    return counts


def _window_allowed(window, stopwords):
    for token in window:
        if token.kind not in WORDLIKE_KINDS:
            return False
        if token.surface.lower() in stopwords:
            return False
    return True


def extract_ngrams_lines(token_lines, n_range=(1, 3), stopwords=frozenset(), min_freq=1):
    """Frequent n-grams over per-line token sequences.

    Returns ``[(ngram, frequency), ...]`` where each ngram is a
    space-joined surface string whose tokens are all word-like (words or
    digit runs up to four digits) and contain no stopword.  Sorted by
    frequency descending, ties broken lexicographically.
    """
    n_min, n_max = n_range
    if not (1 <= n_min <= n_max <= 4):
        raise ValueError("n_range must satisfy 1 <= min <= max <= 4")
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    counts = _count_ngram_windows(token_lines, n_min, n_max)
    result = []
    for window, freq in counts.items():
        if freq >= min_freq and _window_allowed(window, stopwords):
            result.append((" ".join(t.surface for t in window), freq))
    result.sort(key=lambda item: (-item[1], item[0]))
    return result


def extract_ngrams(tokens, n_range=(1, 3), stopwords=frozenset(), min_freq=1):
    """Like :func:`extract_ngrams_lines` for a single contiguous token run."""
    return extract_ngrams_lines([tokens], n_range, stopwords, min_freq)


@dataclass
class NGramTable:
    """Lowercased unigram/bigram frequency table for the LM baseline.

    `alpha` is the additive smoothing constant applied by the unigram
    probability estimate.
    """

    unigram_freq: Counter = field(default_factory=Counter)
    bigram_freq: Counter = field(default_factory=Counter)
    total_tokens: int = 0
    vocab_size: int = 0
    alpha: float = 1.0

    @classmethod
    def from_token_lines(cls, token_lines, alpha=1.0):
        table = cls(alpha=alpha)
        for tokens in token_lines:
            words = [t.surface.lower() for t in tokens]
            table.unigram_freq.update(words)
            table.total_tokens += len(words)
            for prev, cur in zip(words, words[1:]):
                table.bigram_freq[(prev, cur)] += 1
        table.vocab_size = len(table.unigram_freq)
        return table

    @classmethod
    def from_corpus_file(cls, path, alpha=1.0):
        with open(path, encoding="utf-8") as fh:
            return cls.from_token_lines((tokenize(line) for line in fh), alpha=alpha)


def build_ngram_table(tokens):
    """NGramTable over one contiguous token sequence (a single line)."""
    return NGramTable.from_token_lines([tokens])


def read_corpus_tokens(path):
    """Tokenize a one-post-per-line corpus file into per-line token lists."""
    lines = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            lines.append(tokenize(line))
    return lines


def write_ngrams_tsv(ngrams, path):
    """Dump ``(ngram, frequency)`` pairs as ``ngram<TAB>frequency`` lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for gram, freq in ngrams:
            fh.write(f"{gram}\t{freq}\n")


def read_ngrams_tsv(path):
    ngrams = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'ngram<TAB>frequency'")
            try:
                freq = int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: frequency is not an integer") from None
            ngrams.append((parts[0], freq))
    return ngrams
