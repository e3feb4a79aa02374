"""Static word embeddings: CBOW and skip-gram with negative sampling."""

from .model import (
    EmbeddingModel,
    PairEvaluation,
    TrainConfig,
    analogy,
    cosine,
    default_pairs,
    evaluate_pairs,
    load_binary,
    load_pairs,
    load_text,
    most_similar,
    save_binary,
    save_text,
    train,
)
from .vocab import Vocabulary, build_vocab

__all__ = [
    "EmbeddingModel", "PairEvaluation", "TrainConfig", "Vocabulary", "analogy", "build_vocab", "cosine",
    "default_pairs", "evaluate_pairs", "load_binary", "load_pairs", "load_text", "most_similar",
    "save_binary", "save_text", "train",
]
