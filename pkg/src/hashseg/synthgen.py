"""Synthetic labeled hashtags from frequent corpus n-grams.

A hashtag template is an ordered list of slots (lowercase word,
Capitalized word, UPPERCASE word, digit run) with a joiner (nothing or
an underscore) between consecutive slots.  Word slots are filled from a
sampled n-gram, with the slot forcing the case; digit slots are filled
with random digit runs (year-style slots draw from 1990-2029).

Labels follow the end-of-word convention: every character that ends a
word gets label 1, every underscore gets label 1, everything else 0, so
the number of ones equals words plus underscore joiners and the final
label is always 1.

Dataset files are TSV: ``hashtag<TAB>gold_segmentation<TAB>type_id``
with the gold segmentation space-joined.  External test sets may omit
the type column (type -1 = unknown).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .rng import Rng


class SlotKind(Enum):
    WORD_LOWER = "word-lower"
    WORD_CAPITALIZED = "word-capitalized"
    WORD_UPPER = "word-upper"
    DIGITS = "digit-run"


WORD_SLOT_KINDS = frozenset(
    {SlotKind.WORD_LOWER, SlotKind.WORD_CAPITALIZED, SlotKind.WORD_UPPER}
)


@dataclass(frozen=True)
class Slot:
    kind: SlotKind
    year_like: bool = False  # digit slots only: sample 1990-2029


@dataclass(frozen=True)
class HashtagTemplate:
    type_id: int
    name: str
    slots: tuple
    joiners: tuple  # "" or "_", one per adjacent slot pair

    def __post_init__(self):
        if len(self.slots) < 1:
            raise ValueError("template needs at least one slot")
        if len(self.joiners) != len(self.slots) - 1:
            raise ValueError("joiners length must be slots length - 1")
        if any(j not in ("", "_") for j in self.joiners):
            raise ValueError("joiners must be '' or '_'")

    @property
    def word_slot_count(self):
        return sum(1 for s in self.slots if s.kind in WORD_SLOT_KINDS)


_L = Slot(SlotKind.WORD_LOWER)
_C = Slot(SlotKind.WORD_CAPITALIZED)
_U = Slot(SlotKind.WORD_UPPER)
_DY = Slot(SlotKind.DIGITS, year_like=True)
_D = Slot(SlotKind.DIGITS)

#: The built-in eleven-type catalog.  Types 3, 6 and 7 are the
#: morphologically complex lowercase-concatenation family.
DEFAULT_CATALOG = (
    HashtagTemplate(1, "word_year", (_L, _DY), ("_",)),
    HashtagTemplate(2, "ABBREV_year", (_U, _DY), ("_",)),
    HashtagTemplate(3, "wordword_year", (_L, _L, _DY), ("", "_")),
    HashtagTemplate(4, "word_word", (_L, _L), ("_",)),
    HashtagTemplate(5, "Word_Word", (_C, _C), ("_",)),
    HashtagTemplate(6, "wordword", (_L, _L), ("",)),
    HashtagTemplate(7, "wordwordword", (_L, _L, _L), ("", "")),
    HashtagTemplate(8, "word_word_word", (_L, _L, _L), ("_", "_")),
    HashtagTemplate(9, "wordyearword", (_L, _DY, _L), ("", "")),
    HashtagTemplate(10, "wordword_worddigits", (_L, _L, _L, _D), ("", "_", "")),
    HashtagTemplate(11, "Wordworddigits", (_C, _L, _D), ("", "")),
)


@dataclass(frozen=True)
class LabeledHashtag:
    chars: str
    labels: tuple
    type_id: int = -1
    gold_segmentation: tuple = ()


def labels_from_segmentation(words, joiners=None, type_id=-1):
    """Build a :class:`LabeledHashtag` from gold words and joiners.

    Words must be non-empty and free of whitespace and underscores;
    `joiners` defaults to direct concatenation everywhere.
    """
    words = list(words)
    if not words:
        raise ValueError("need at least one word")
    for word in words:
        if not word:
            raise ValueError("words must be non-empty")
        if any(ch.isspace() for ch in word) or "_" in word:
            raise ValueError(f"word {word!r} contains whitespace or underscore")
    if joiners is None:
        joiners = [""] * (len(words) - 1)
    joiners = list(joiners)
    if len(joiners) != len(words) - 1:
        raise ValueError("joiners length must be words length - 1")
    if any(j not in ("", "_") for j in joiners):
        raise ValueError("joiners must be '' or '_'")

    chars = []
    labels = []
    for i, word in enumerate(words):
        chars.append(word)
        labels.extend([0] * (len(word) - 1))
        labels.append(1)
        if i < len(words) - 1 and joiners[i] == "_":
            chars.append("_")
            labels.append(1)
    return LabeledHashtag(
        chars="".join(chars),
        labels=tuple(labels),
        type_id=type_id,
        gold_segmentation=tuple(words),
    )


def apply_labels(chars, labels):
    """Decode a label sequence back into words.

    Splits after every 1-label (the final label is treated as 1 whether
    or not the caller set it), strips underscores from token edges and
    drops tokens that were only underscores.
    """
    if len(chars) != len(labels):
        raise ValueError("chars and labels must have equal length")
    words = []
    start = 0
    last = len(chars) - 1
    for i, label in enumerate(labels):
        if label == 1 or i == last:
            token = chars[start : i + 1].strip("_")
            if token:
                words.append(token)
            start = i + 1
    return words


def labels_for_words(chars, words, ignore_case=False):
    """Label sequence that segments `chars` into `words`.

    The inverse of the TSV round trip: walks the hashtag, marking each
    word-final character and each separating underscore with 1.  Raises
    ValueError when the words do not tile the hashtag.
    """
    reference = chars.lower() if ignore_case else chars
    labels = [0] * len(chars)
    pos = 0
    for word in words:
        probe = word.lower() if ignore_case else word
        while pos < len(chars) and chars[pos] == "_":
            labels[pos] = 1
            pos += 1
        if not reference.startswith(probe, pos) or not probe:
            raise ValueError(f"segmentation {words!r} does not match {chars!r}")
        pos += len(probe)
        labels[pos - 1] = 1
    while pos < len(chars) and chars[pos] == "_":
        labels[pos] = 1
        pos += 1
    if pos != len(chars):
        raise ValueError(f"segmentation {words!r} does not cover {chars!r}")
    return tuple(labels)


def _adjust_case(word, kind):
    if kind is SlotKind.WORD_LOWER:
        return word.lower()
    if kind is SlotKind.WORD_UPPER:
        return word.upper()
    return word[:1].upper() + word[1:].lower()


def _eligible_by_word_count(ngrams):
    """Group all-alphabetic n-grams (with cumulative weights) by length."""
    buckets = {}
    for gram, freq in ngrams:
        words = gram.split(" ")
        if freq <= 0 or not all(w.isalpha() for w in words):
            continue
        buckets.setdefault(len(words), []).append((words, freq))
    prepared = {}
    for count, entries in buckets.items():
        cumulative = []
        running = 0
        for _, freq in entries:
            running += freq
            cumulative.append(running)
        prepared[count] = ([words for words, _ in entries], cumulative)
    return prepared


def _sample_digits(rng, slot):
    if slot.year_like:
        return str(1990 + rng.randint(40))
    length = 1 + rng.randint(4)
    return "".join(str(rng.randint(10)) for _ in range(length))


def generate_dataset(ngrams, count, seed, catalog=DEFAULT_CATALOG, type_weights=None):
    """Generate `count` labeled hashtags from extracted n-grams.

    Templates are sampled uniformly by default (or by `type_weights`,
    a ``{type_id: weight}`` map); the source n-gram is sampled
    proportionally to its corpus frequency among the n-grams whose word
    count matches the template.  Templates with no eligible source
    n-gram are dropped from the mixture.  Deterministic given `seed`.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return []
    buckets = _eligible_by_word_count(list(ngrams))

    usable = []
    weights = []
    for template in catalog:
        if template.word_slot_count not in buckets:
            continue
        weight = 1.0 if type_weights is None else float(type_weights.get(template.type_id, 0.0))
        if weight > 0:
            usable.append(template)
            weights.append(weight)
    if not usable:
        raise ValueError("no template has an eligible source n-gram")

    cumulative_templates = []
    running = 0.0
    for w in weights:
        running += w
        cumulative_templates.append(running)

    rng = Rng(seed)
    items = []
    for _ in range(count):
        template = usable[rng.weighted_index(cumulative_templates)]
        grams, cumfreq = buckets[template.word_slot_count]
        gram_words = grams[rng.weighted_index(cumfreq)]
        word_iter = iter(gram_words)
        words = []
        for slot in template.slots:
            if slot.kind is SlotKind.DIGITS:
                words.append(_sample_digits(rng, slot))
            else:
                words.append(_adjust_case(next(word_iter), slot.kind))
        joiners = list(template.joiners)
        items.append(labels_from_segmentation(words, joiners, type_id=template.type_id))
    return items


class DatasetFormatError(ValueError):
    """A dataset TSV line that cannot be parsed; carries the line number."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def write_dataset(items, path):
    """Write labeled hashtags as ``hashtag<TAB>gold<TAB>type_id`` TSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for item in items:
            gold = " ".join(item.gold_segmentation)
            fh.write(f"{item.chars}\t{gold}\t{item.type_id}\n")


def read_dataset(path):
    """Read a dataset TSV back into :class:`LabeledHashtag` items."""
    items = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise DatasetFormatError(path, lineno, "expected 2 or 3 tab-separated columns")
            chars, gold = parts[0], parts[1]
            if not chars or not gold:
                raise DatasetFormatError(path, lineno, "empty hashtag or segmentation")
            if len(parts) == 3:
                try:
                    type_id = int(parts[2])
                except ValueError:
                    raise DatasetFormatError(path, lineno, "type_id is not an integer") from None
            else:
                type_id = -1
            words = tuple(gold.split(" "))
            try:
                labels = labels_for_words(chars, words)
            except ValueError as exc:
                raise DatasetFormatError(path, lineno, str(exc)) from None
            items.append(LabeledHashtag(chars, labels, type_id, words))
    return items
