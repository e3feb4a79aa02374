"""Frequency-filtered vocabulary."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import TrainingError
from ..textprep.text import TokenizedDoc


def _tokens(doc) -> Sequence[str]:
    return doc.tokens if isinstance(doc, TokenizedDoc) else doc


def count_tokens(corpus: Iterable) -> Counter:
    counts: Counter = Counter()
    for doc in corpus:
        counts.update(_tokens(doc))
    return counts


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    counts: np.ndarray  # int64, parallel to words

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    @property
    def index(self) -> dict[str, int]:
        cached = self.__dict__.get("_index")
        if cached is None:
            cached = {w: i for i, w in enumerate(self.words)}
            object.__setattr__(self, "_index", cached)
        return cached


def build_vocab(corpus: Iterable, min_count: int = 5) -> Vocabulary:
    """Tokens with frequency >= ``min_count``, sorted by descending count then token."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts = count_tokens(corpus)
    kept = sorted(((w, c) for w, c in counts.items() if c >= min_count), key=lambda wc: (-wc[1], wc[0]))
    if not kept:
        raise TrainingError(f"no token reaches min_count={min_count}")
    return Vocabulary(tuple(w for w, _ in kept), np.array([c for _, c in kept], dtype=np.int64))
