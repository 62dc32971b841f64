"""Pool-based active learning for the hashtag labeler.

The loop starts from a random seed batch, then repeatedly moves the
pool items the model is least sure about into the training set and
retrains, until the pool is empty.  Uncertainty is the mean per-position
log probability of the likelier label (lower = less confident); ties
fall back to pool order so runs are fully deterministic.

Two retraining modes:

* ``continue`` (default): warm-start from the previous round's weights
  and run ``epochs_per_round`` passes over everything selected so far.
* ``scratch``: reinitialize and train for the full ``train.epochs``
  on everything selected so far.

The character vocab is built from the whole pool up front so a
warm-started model never meets an unknown id later.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, replace

from .evalviz import evaluate
from .rng import Rng
from .segmodel import ModelCheckpoint, TrainConfig, Vocab, mean_max_log_prob, train

logger = logging.getLogger(__name__)

RETRAIN_MODES = ("continue", "scratch")

AL_SCHEMA_VERSION = 1


@dataclass
class ALConfig:
    round_size: int = 1000
    retrain_mode: str = "continue"
    epochs_per_round: int = 2
    seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.round_size < 1:
            raise ValueError("round_size must be positive")
        if self.retrain_mode not in RETRAIN_MODES:
            raise ValueError(
                f"retrain_mode must be one of {RETRAIN_MODES}, got {self.retrain_mode!r}"
            )
        if self.epochs_per_round < 1:
            raise ValueError("epochs_per_round must be positive")


@dataclass
class ALRoundLog:
    round_index: int  # 1-based
    train_size: int  # items selected so far, this round included
    test_accuracy: float
    type_histogram: dict  # type_id -> count among this round's picks
    selected_ids: list  # pool indices picked this round, selection order


@dataclass
class ALRunLog:
    config: ALConfig
    rounds: list

    @property
    def selection_order(self):
        """Pool indices in the order the loop selected them."""
        order = []
        for entry in self.rounds:
            order.extend(entry.selected_ids)
        return order

    def to_dict(self) -> dict:
        return {
            "schema_version": AL_SCHEMA_VERSION,
            "config": asdict(self.config),
            "rounds": [
                {
                    "round_index": r.round_index,
                    "train_size": r.train_size,
                    "test_accuracy": r.test_accuracy,
                    "type_histogram": {
                        str(k): v for k, v in sorted(r.type_histogram.items())
                    },
                    "selected_ids": list(r.selected_ids),
                }
                for r in self.rounds
            ],
        }


def select_least_confident(model: ModelCheckpoint, pool, candidate_ids, k: int):
    """The `k` candidate ids the model is least confident about.

    Ranked by mean max log probability ascending; equal scores keep
    pool order.
    """
    scored = sorted(
        candidate_ids,
        key=lambda i: (mean_max_log_prob(model, pool[i].chars), i),
    )
    return scored[:k]


def _type_histogram(pool, ids) -> dict:
    hist: dict = {}
    for i in ids:
        t = pool[i].type_id
        hist[t] = hist.get(t, 0) + 1
    return hist


def al_run(pool, test_set, config: ALConfig) -> ALRunLog:
    """Run the full selection loop over `pool`, reporting per-round accuracy.

    Returns a log with one entry per round; the model itself is a
    byproduct and not returned, rerun :func:`hashseg.segmodel.train` on a
    prefix of ``selection_order`` to reproduce any round's training set.
    """
    pool = list(pool)
    test_set = list(test_set)
    if not pool:
        raise ValueError("pool must not be empty")
    rng = Rng(config.seed)
    vocab = Vocab.from_texts(item.chars for item in pool)

    remaining = list(range(len(pool)))
    selected: list = []
    model = None
    rounds = []
    round_index = 0
    while remaining:
        round_index += 1
        k = min(config.round_size, len(remaining))
        if model is None:
            picked_positions = rng.sample_indices(len(remaining), k)
            picked = [remaining[p] for p in picked_positions]
        else:
            picked = select_least_confident(model, pool, remaining, k)
        picked_set = set(picked)
        remaining = [i for i in remaining if i not in picked_set]
        selected.extend(picked)

        train_seed = rng.next_u64()
        train_set = [pool[i] for i in selected]
        if config.retrain_mode == "continue":
            round_cfg = replace(config.train, epochs=config.epochs_per_round,
                                seed=train_seed)
            model = train(train_set, round_cfg, start=model, vocab=vocab)
        else:
            round_cfg = replace(config.train, seed=train_seed)
            model = train(train_set, round_cfg, vocab=vocab)

        report = evaluate(model, test_set)
        rounds.append(
            ALRoundLog(
                round_index=round_index,
                train_size=len(selected),
                test_accuracy=report.accuracy,
                type_histogram=_type_histogram(pool, picked),
                selected_ids=picked,
            )
        )
        logger.info(
            "round %d: train size %d, test accuracy %.4f",
            round_index, len(selected), report.accuracy,
        )
    return ALRunLog(config=config, rounds=rounds)


def write_al_json(log: ALRunLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(log.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_al_csv(log: ALRunLog, path) -> None:
    """Learning-curve table: round, train_size, accuracy."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "train_size", "accuracy"])
        for entry in log.rounds:
            writer.writerow(
                [entry.round_index, entry.train_size, f"{entry.test_accuracy:.6f}"]
            )
