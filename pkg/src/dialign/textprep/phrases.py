"""Collocation detection and phrase merging.

A bigram ``(a, b)`` is merged into ``a_b`` when

    (count(ab) - min_count) * V / (count(a) * count(b)) >= threshold

with ``V`` the number of distinct unigrams. Running a second stage over the
merged output yields trigrams such as ``te_reo_māori``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .text import TokenizedDoc

DELIMITER = "_"


def phrase_score(count_a: int, count_b: int, count_ab: int, vocab_size: int, min_count: int) -> float:
    return (count_ab - min_count) * vocab_size / (count_a * count_b)


@dataclass
class PhraseModel:
    unigram_counts: Counter = field(default_factory=Counter)
    bigram_counts: Counter = field(default_factory=Counter)
    min_count: int = 1
    threshold: float = 50.0
    stage: int = 1
    scores: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")

    @property
    def vocab_size(self) -> int:
        return len(self.unigram_counts)

    def score(self, a: str, b: str) -> float | None:
        if (a, b) in self.scores:
            return self.scores[(a, b)]
        ab = self.bigram_counts.get((a, b), 0)
        if not ab:
            return None
        return phrase_score(self.unigram_counts[a], self.unigram_counts[b], ab, self.vocab_size, self.min_count)

    def phrasegrams(self) -> dict[tuple[str, str], float]:
        """All bigrams that pass the threshold, with their scores."""
        out = {}
        for pair in self.bigram_counts:
            s = self.score(*pair)
            if s is not None and s >= self.threshold:
                out[pair] = s
        return out

    def save(self, path) -> None:
        """Write ``token_a token_b count score`` lines, preceded by a header comment."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# min_count={self.min_count} threshold={self.threshold!r} vocab={self.vocab_size} stage={self.stage}\n")
            for (a, b), count in sorted(self.bigram_counts.items()):
                fh.write(f"{a} {b} {count} {self.score(a, b)!r}\n")

    @classmethod
    def load(cls, path) -> "PhraseModel":
        params = {}
        bigrams = Counter()
        scores = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("#"):
                    params = dict(kv.split("=", 1) for kv in line[1:].split())
                    continue
                a, b, count, score = line.split()
                bigrams[(a, b)] = int(count)
                scores[(a, b)] = float(score)
        return cls(
            Counter(), bigrams,
            min_count=int(params.get("min_count", 1)),
            threshold=float(params.get("threshold", 50.0)),
            stage=int(params.get("stage", 1)),
            scores=scores,
        )


def _tokens(doc) -> Sequence[str]:
    return doc.tokens if isinstance(doc, TokenizedDoc) else doc


def learn_phrases(corpus: Iterable, min_count: int = 1, threshold: float = 50.0, stage: int = 1) -> PhraseModel:
    """Count unigrams and adjacent bigrams over documents (token lists or docs)."""
    uni: Counter = Counter()
    bi: Counter = Counter()
    for doc in corpus:
        toks = _tokens(doc)
        uni.update(toks)
        bi.update(zip(toks, toks[1:]))
    return PhraseModel(uni, bi, min_count=min_count, threshold=threshold, stage=stage)


def merge_counts(models: Sequence[PhraseModel]) -> PhraseModel:
    """Associative merge of per-partition counts."""
    first = models[0]
    uni, bi = Counter(), Counter()
    for m in models:
        uni.update(m.unigram_counts)
        bi.update(m.bigram_counts)
    return PhraseModel(uni, bi, first.min_count, first.threshold, first.stage)


def apply_phrases_tokens(tokens: Sequence[str], model: PhraseModel) -> list[str]:
    out = []
    i = 0
    n = len(tokens)
    while i < n:
        if i + 1 < n:
            s = model.score(tokens[i], tokens[i + 1])
            if s is not None and s >= model.threshold:
                out.append(tokens[i] + DELIMITER + tokens[i + 1])
                i += 2
                continue
        out.append(tokens[i])
        i += 1
    return out


def apply_phrases(doc, model: PhraseModel):
    """Greedy left-to-right merge of qualifying adjacent pairs."""
    if isinstance(doc, TokenizedDoc):
        return doc.with_tokens(apply_phrases_tokens(doc.tokens, model))
    return apply_phrases_tokens(doc, model)


def learn_phrase_stages(corpus: Sequence, min_count: int = 1, threshold: float = 50.0, stages: int = 2) -> list[PhraseModel]:
    """Learn bigram then trigram models; each stage trains on the previous output."""
    models = []
    current = [list(_tokens(d)) for d in corpus]
    for stage in range(1, stages + 1):
        model = learn_phrases(current, min_count, threshold, stage)
        models.append(model)
        current = [apply_phrases_tokens(toks, model) for toks in current]
    return models
