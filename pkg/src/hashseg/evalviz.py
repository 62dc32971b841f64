"""Evaluation reports and embedding projection.

Evaluation is exact-match over label sequences: a hashtag counts as
correct only when every position label agrees with gold.  Reports break
accuracy down by hashtag type and keep a capped list of error examples.

The projection side reduces the learned character embeddings to two
dimensions with a small power-iteration SVD so the vectors can be
plotted and eyeballed for structure (case, digits, separators).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .lmbaseline import segment_dp
from .segmodel import ModelCheckpoint, predict
from .synthgen import apply_labels, labels_for_words
from .textcorpus import NGramTable

ERROR_SAMPLE_CAP = 50


@dataclass
class TypeStats:
    total: int = 0
    correct: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


@dataclass
class EvalReport:
    total: int
    correct: int
    per_type: dict
    error_samples: list = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "per_type": {
                str(type_id): {
                    "total": st.total,
                    "correct": st.correct,
                    "accuracy": st.accuracy,
                }
                for type_id, st in sorted(self.per_type.items())
            },
            "error_samples": [
                {"hashtag": h, "predicted": p, "gold": g}
                for h, p, g in self.error_samples
            ],
        }


def _as_label_fn(predictor):
    """Accept either a checkpoint or a plain chars -> labels callable."""
    if isinstance(predictor, ModelCheckpoint):
        return lambda chars: predict(predictor, chars).labels
    if callable(predictor):
        return predictor
    raise TypeError(f"cannot evaluate with {type(predictor).__name__}")


def evaluate(predictor, dataset, error_sample_cap: int = ERROR_SAMPLE_CAP) -> EvalReport:
    """Exact-match accuracy of `predictor` over labeled hashtags.

    `predictor` is a :class:`ModelCheckpoint` or any callable mapping a
    character sequence to a label sequence of equal length.
    """
    label_fn = _as_label_fn(predictor)
    total = 0
    correct = 0
    per_type: dict = {}
    errors = []
    for item in dataset:
        total += 1
        got = tuple(label_fn(item.chars))
        want = tuple(item.labels)
        if len(got) != len(want):
            raise ValueError(
                f"predictor returned {len(got)} labels for {len(want)} characters"
            )
        hit = got == want
        stats = per_type.setdefault(item.type_id, TypeStats())
        stats.total += 1
        if hit:
            correct += 1
            stats.correct += 1
        elif len(errors) < error_sample_cap:
            gold = item.gold_segmentation or tuple(apply_labels(item.chars, item.labels))
            errors.append(
                (item.chars, " ".join(apply_labels(item.chars, got)), " ".join(gold))
            )
    return EvalReport(total=total, correct=correct, per_type=per_type, error_samples=errors)


def baseline_label_predictor(table: NGramTable, max_word_len: int = 20,
                             unigram_only: bool = False):
    """Wrap the n-gram segmenter as a chars -> labels callable.

    The segmenter works on lowercased, underscore-free text, so its
    words are mapped back onto the original characters case-insensitively
    (underscores between words come back as boundary positions).
    """
    def label_fn(chars):
        text = "".join(chars)
        hyp = segment_dp(table, text, max_word_len=max_word_len,
                         unigram_only=unigram_only)
        return labels_for_words(text, hyp.words, ignore_case=True)

    return label_fn


def write_eval_json(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_eval_tsv(report: EvalReport, path) -> None:
    """One-line machine-readable summary: total, correct, accuracy."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{report.total}\t{report.correct}\t{report.accuracy:.6f}\n")


# ---------------------------------------------------------------------------
# two-dimensional projection of the embedding table
# ---------------------------------------------------------------------------


def _power_iterate(gram: np.ndarray, tol: float = 1e-10, max_iter: int = 10000):
    """Dominant eigenpair of a symmetric PSD matrix by power iteration."""
    d = gram.shape[0]
    starts = [np.ones(d) / np.sqrt(d)]
    starts.extend(np.eye(d))
    v = starts[0]
    for candidate in starts:
        if np.linalg.norm(gram @ candidate) > 0.0:
            v = candidate
            break
    else:
        return 0.0, v  # zero matrix
    for _ in range(max_iter):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0, v
        w /= norm
        if np.linalg.norm(w - v) < tol:
            v = w
            break
        v = w
    eigval = float(v @ gram @ v)
    return max(eigval, 0.0), v


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry positive (ties: first such entry)."""
    idx = int(np.argmax(np.abs(v)))
    return -v if v[idx] < 0 else v


def svd_top2(matrix):
    """Top two singular values and right singular vectors of a centered matrix.

    Columns of `matrix` are mean-centered, then the two dominant
    eigenpairs of the Gram matrix Xc^T Xc are found by power iteration
    with deflation.  Returns ``(sigmas, components, explained_ratio)``:
    sigmas is a (2,) array, components a (2, d) array of unit vectors
    (largest-magnitude entry positive), and explained_ratio the share of
    squared Frobenius norm captured (1.0 for an all-zero centered
    matrix).
    """
    X = np.asarray(matrix, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a 2-d array")
    if X.shape[0] < 1 or X.shape[1] < 2:
        raise ValueError("need at least one row and two columns")
    Xc = X - X.mean(axis=0)
    gram = Xc.T @ Xc
    lam1, v1 = _power_iterate(gram)
    deflated = gram - lam1 * np.outer(v1, v1)
    lam2, v2 = _power_iterate(deflated)
    # re-orthogonalize against v1; deflation leaves tiny components behind
    v2 = v2 - (v2 @ v1) * v1
    norm = np.linalg.norm(v2)
    if norm > 0.0:
        v2 /= norm
    lam2 = max(float(v2 @ gram @ v2), 0.0)
    sigmas = np.array([np.sqrt(lam1), np.sqrt(lam2)])
    components = np.vstack([_fix_sign(v1), _fix_sign(v2)])
    total = float((Xc * Xc).sum())
    explained = 1.0 if total == 0.0 else float((sigmas**2).sum() / total)
    return sigmas, components, explained


def char_category(char: str) -> str:
    if char == "_":
        return "underscore"
    if char.isdigit():
        return "digit"
    if char.isalpha():
        return "upper" if char.isupper() else "lower"
    return "other"


@dataclass
class EmbeddingProjection:
    chars: list
    categories: list
    coords: np.ndarray  # (vocab_size, 2)
    sigmas: np.ndarray
    explained_ratio: float


def project_embeddings(model: ModelCheckpoint) -> EmbeddingProjection:
    """Project every character embedding onto the top two singular directions."""
    sigmas, components, explained = svd_top2(model.embedding)
    centered = model.embedding - model.embedding.mean(axis=0)
    coords = centered @ components.T
    chars = list(model.vocab.id_to_char)
    return EmbeddingProjection(
        chars=chars,
        categories=[char_category(c) for c in chars],
        coords=coords,
        sigmas=sigmas,
        explained_ratio=explained,
    )


def write_projection_csv(projection: EmbeddingProjection, path) -> None:
    """CSV with one row per character: char, category, x, y."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["char", "category", "x", "y"])
        for char, cat, (x, y) in zip(projection.chars, projection.categories,
                                     projection.coords):
            writer.writerow([char, cat, f"{x:.10g}", f"{y:.10g}"])
