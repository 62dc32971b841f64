"""Hashtag segmentation toolkit.

Splits hashtags like ``#nlproc2017`` into words by labeling each
character as word-final or not.  The package bundles the whole
experimental pipeline: corpus n-gram extraction, synthetic hashtag
generation, a character BiLSTM labeler with hand-rolled gradients, an
n-gram language model baseline, uncertainty-based active learning, and
embedding projection for plots.
"""

from .active import ALConfig, ALRoundLog, ALRunLog, al_run, select_least_confident
from .evalviz import (
    EmbeddingProjection,
    EvalReport,
    baseline_label_predictor,
    evaluate,
    project_embeddings,
    svd_top2,
)
from .lmbaseline import SegmentationHypothesis, score_segmentation, segment_dp
from .rng import Rng
from .segmodel import (
    ModelCheckpoint,
    Prediction,
    TrainConfig,
    Vocab,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)
from .synthgen import (
    DEFAULT_CATALOG,
    HashtagTemplate,
    LabeledHashtag,
    apply_labels,
    generate_dataset,
    labels_from_segmentation,
    read_dataset,
    write_dataset,
)
from .textcorpus import (
    NGramTable,
    Token,
    TokenKind,
    extract_ngrams,
    extract_ngrams_lines,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "ALConfig",
    "ALRoundLog",
    "ALRunLog",
    "DEFAULT_CATALOG",
    "EmbeddingProjection",
    "EvalReport",
    "HashtagTemplate",
    "LabeledHashtag",
    "ModelCheckpoint",
    "NGramTable",
    "Prediction",
    "Rng",
    "SegmentationHypothesis",
    "Token",
    "TokenKind",
    "TrainConfig",
    "Vocab",
    "al_run",
    "apply_labels",
    "baseline_label_predictor",
    "evaluate",
    "extract_ngrams",
    "extract_ngrams_lines",
    "generate_dataset",
    "labels_from_segmentation",
    "load_checkpoint",
    "predict",
    "project_embeddings",
    "read_dataset",
    "save_checkpoint",
    "score_segmentation",
    "segment_dp",
    "select_least_confident",
    "svd_top2",
    "tokenize",
    "train",
    "write_dataset",
]
