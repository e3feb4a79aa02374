"""Embedding models: training, similarity queries, evaluation and persistence."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from ..errors import OOVError, TrainingError, UndefinedInputError, ValidationError
from .kernel import train_epochs
from .vocab import Vocabulary, _tokens, build_vocab, count_tokens

ARCHITECTURES = ("sgns", "cbow")
NOISE_POWER = 0.75
CUM_TABLE_DOMAIN = 2**31 - 1


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 300
    window: int = 5
    min_count: int = 5
    negatives: int = 5
    epochs: int = 5
    alpha: float | None = None  # None: 0.025 for sgns, 0.05 for cbow
    min_alpha: float = 1e-4
    sample: float = 1e-4
    architecture: str = "sgns"
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.min_count < 1:
            raise ValidationError("dim, window and min_count must be >= 1")
        if self.negatives < 1 or self.epochs < 0:
            raise ValidationError("negatives must be >= 1 and epochs >= 0")
        if self.architecture not in ARCHITECTURES:
            raise ValidationError(f"architecture must be one of {ARCHITECTURES}")

    @property
    def start_alpha(self) -> float:
        if self.alpha is not None:
            return self.alpha
        return 0.025 if self.architecture == "sgns" else 0.05

    def compatible(self, other: "TrainConfig") -> bool:
        keys = ("dim", "window", "negatives", "architecture")
        return all(getattr(self, k) == getattr(other, k) for k in keys)


@dataclass
class EmbeddingModel:
    vocab: Vocabulary
    vectors: np.ndarray  # input vectors, float32 (|V|, dim)
    context: np.ndarray | None  # output (negative-sampling) vectors
    config: TrainConfig

    def __post_init__(self):
        self._unit = None

    @classmethod
    def from_vectors(cls, words, vectors, config: TrainConfig | None = None) -> "EmbeddingModel":
        """Wrap fixed vectors (e.g. loaded from disk) without counts or context weights."""
        vectors = np.asarray(vectors, dtype=np.float32)
        config = config or TrainConfig(dim=vectors.shape[1], min_count=1)
        vocab = Vocabulary(tuple(words), np.zeros(len(words), dtype=np.int64))
        return cls(vocab, vectors, None, replace(config, dim=vectors.shape[1]))

    @property
    def index(self) -> dict[str, int]:
        return self.vocab.index

    @property
    def words(self) -> tuple[str, ...]:
        return self.vocab.words

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __contains__(self, word) -> bool:
        return word in self.vocab.index

    def _row(self, word: str) -> int:
        try:
            return self.vocab.index[word]
        except KeyError:
            raise OOVError(word) from None

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self._row(word)]

    def unit_vectors(self) -> np.ndarray:
        if self._unit is None:
            v = self.vectors.astype(np.float64)
            norms = np.linalg.norm(v, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            self._unit = v / norms
        return self._unit

    def invalidate(self) -> None:
        self._unit = None


def _sentences(corpus: Iterable, index: dict[str, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ids, offsets = [], [0]
    raw = np.zeros(len(index), dtype=np.int64)
    for doc in corpus:
        sent = [index[t] for t in _tokens(doc) if t in index]
        if len(sent) < 2:
            continue
        ids.extend(sent)
        offsets.append(len(ids))
    corpus_ids = np.array(ids, dtype=np.int32)
    np.add.at(raw, corpus_ids, 1)
    return corpus_ids, np.array(offsets, dtype=np.int64), raw


def _keep_probabilities(counts: np.ndarray, sample: float) -> np.ndarray:
    """Reference subsampling rule: keep with (sqrt(f/t) + 1) * t/f, capped at 1."""
    total = counts.sum()
    keep = np.ones(len(counts), dtype=np.float64)
    if sample <= 0 or total == 0:
        return keep
    threshold = sample * total
    nz = counts > 0
    c = counts[nz].astype(np.float64)
    keep[nz] = np.minimum(1.0, (np.sqrt(c / threshold) + 1.0) * threshold / c)
    return keep


def _cum_table(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(np.float64) ** NOISE_POWER
    if weights.sum() == 0:
        weights = np.ones_like(weights)
    cum = np.cumsum(weights / weights.sum())
    table = np.round(cum * CUM_TABLE_DOMAIN).astype(np.int64)
    table[-1] = CUM_TABLE_DOMAIN
    return table


def _init_rows(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    return ((rng.random((n, dim)) - 0.5) / dim).astype(np.float32)


def _merged_vocab(corpus: Sequence, config: TrainConfig, init: EmbeddingModel | None) -> tuple[Vocabulary, int]:
    """Vocabulary for this run; with ``init`` the old order is kept and new words appended."""
    if init is None:
        vocab = build_vocab(corpus, config.min_count)
        return vocab, 0
    counts = count_tokens(corpus)
    old_words = list(init.vocab.words)
    old_index = init.vocab.index
    merged = init.vocab.counts.astype(np.int64).copy()
    for w, c in counts.items():
        if w in old_index:
            merged[old_index[w]] += c
    new = sorted(((w, c) for w, c in counts.items() if w not in old_index and c >= config.min_count),
                 key=lambda wc: (-wc[1], wc[0]))
    words = tuple(old_words + [w for w, _ in new])
    all_counts = np.concatenate([merged, np.array([c for _, c in new], dtype=np.int64)])
    return Vocabulary(words, all_counts), len(old_words)


def train(corpus: Sequence, config: TrainConfig | None = None, init: EmbeddingModel | None = None) -> EmbeddingModel:
    """Train CBOW or skip-gram vectors with negative sampling.

    With ``init``, its vocabulary order and vectors carry over; words new to
    this corpus (at ``min_count``) are appended with fresh random rows and
    frequency counts accumulate across runs. Training is single-threaded and
    deterministic for a given seed. An ``init`` model given a corpus with
    nothing to train on is returned unchanged (up to appended rows).
    """
    config = config or TrainConfig()
    corpus = list(corpus)
    if init is not None and not init.config.compatible(config):
        raise ValidationError("init model configuration does not match")
    vocab, n_old = _merged_vocab(corpus, config, init)
    rng = np.random.default_rng(config.seed)
    vectors = _init_rows(len(vocab), config.dim, rng)
    context = np.zeros((len(vocab), config.dim), dtype=np.float32)
    if init is not None:
        vectors[:n_old] = init.vectors
        if init.context is not None:
            context[:n_old] = init.context
    ids, offsets, raw = _sentences(corpus, vocab.index)
    if config.epochs > 0 and (len(offsets) >= 2 or init is None):
        if len(offsets) < 2:
            raise TrainingError("corpus has no sentence with two in-vocabulary tokens")
        keep = _keep_probabilities(raw, config.sample)
        table = _cum_table(vocab.counts)
        train_epochs(ids, offsets, vectors, context, table, keep, config.architecture == "sgns",
                     config.window, config.negatives, config.start_alpha, config.min_alpha,
                     config.epochs, config.seed)
    if not np.all(np.isfinite(vectors)):
        raise TrainingError("non-finite vectors after training")
    return EmbeddingModel(vocab, vectors, context, config)


def cosine(model: EmbeddingModel, a: str, b: str) -> float:
    u = model.vector(a).astype(np.float64)
    v = model.vector(b).astype(np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


def _rank(model: EmbeddingModel, query: np.ndarray, exclude: set[str], k: int) -> list[tuple[str, float]]:
    unit = model.unit_vectors()
    norm = np.linalg.norm(query)
    sims = unit @ (query / norm) if norm > 0 else np.zeros(len(model.words))
    # stable order: by similarity, then vocabulary position
    order = np.lexsort((np.arange(len(sims)), -sims))
    out = []
    for i in order:
        w = model.words[i]
        if w in exclude:
            continue
        out.append((w, float(sims[i])))
        if len(out) == k:
            break
    return out


def most_similar(model: EmbeddingModel, token: str, k: int = 10) -> list[tuple[str, float]]:
    """Top-``k`` neighbours by cosine, excluding the query."""
    q = model.unit_vectors()[model._row(token)]
    return _rank(model, q, {token}, k)


def analogy(model: EmbeddingModel, a: str, b: str, c: str, k: int = 10) -> list[tuple[str, float]]:
    """Rank by cosine to ``a + b - c`` over unit vectors, excluding the three inputs."""
    unit = model.unit_vectors()
    q = unit[model._row(a)] + unit[model._row(b)] - unit[model._row(c)]
    return _rank(model, q, {a, b, c}, k)


@dataclass(frozen=True)
class PairEvaluation:
    mean: float
    oov: int
    scores: list  # (source, target, cosine or None)

    @property
    def scored(self) -> int:
        return sum(1 for s in self.scores if s[2] is not None)


def evaluate_pairs(model: EmbeddingModel, pairs: Sequence[tuple[str, str]]) -> PairEvaluation:
    """Mean cosine over pairs; pairs with an unknown token are skipped and counted."""
    if not pairs:
        raise UndefinedInputError("empty pair list")
    scores = []
    for a, b in pairs:
        scores.append((a, b, cosine(model, a, b) if a in model and b in model else None))
    known = [s for _, _, s in scores if s is not None]
    if not known:
        raise UndefinedInputError("every pair is out of vocabulary")
    return PairEvaluation(float(np.mean(known)), len(scores) - len(known), scores)


def load_pairs(path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2:
                raise ValidationError(f"pair line needs two tokens: {line.strip()!r}")
            pairs.append((parts[0].lower(), parts[1].lower()))
    if not pairs:
        raise ValidationError("pair list is empty")
    return pairs


def default_pairs() -> list[tuple[str, str]]:
    """The bundled hypocoristic / full-form pairs."""
    from importlib import resources

    path = resources.files("dialign") / "data" / "hypocoristics.txt"
    with resources.as_file(path) as p:
        return load_pairs(p)


def save_text(model: EmbeddingModel, path) -> None:
    """``<V> <dim>`` header, then one line per token with its vector."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(model.words)} {model.dim}\n")
        for w, row in zip(model.words, model.vectors):
            fh.write(w + " " + " ".join(f"{x:.9g}" for x in row.tolist()) + "\n")


def save_binary(model: EmbeddingModel, path) -> None:
    """Same layout with little-endian float32 payloads."""
    with open(path, "wb") as fh:
        fh.write(f"{len(model.words)} {model.dim}\n".encode())
        for w, row in zip(model.words, model.vectors):
            fh.write(w.encode("utf-8") + b" " + row.astype("<f4").tobytes() + b"\n")


def _loaded(words: list[str], vectors: np.ndarray, config: TrainConfig | None) -> EmbeddingModel:
    return EmbeddingModel.from_vectors(words, vectors, config)


def load_text(path, config: TrainConfig | None = None) -> EmbeddingModel:
    with open(path, encoding="utf-8") as fh:
        n, dim = map(int, fh.readline().split())
        words, rows = [], []
        for line in fh:
            parts = line.rstrip("\n").split(" ")
            words.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    vectors = np.array(rows, dtype=np.float32).reshape(n, dim)
    return _loaded(words, vectors, config)


def load_binary(path, config: TrainConfig | None = None) -> EmbeddingModel:
    with open(path, "rb") as fh:
        n, dim = map(int, fh.readline().split())
        words = []
        vectors = np.empty((n, dim), dtype=np.float32)
        for i in range(n):
            word = bytearray()
            while True:
                ch = fh.read(1)
                if ch == b" ":
                    break
                word.extend(ch)
            words.append(word.decode("utf-8"))
            vectors[i] = np.frombuffer(fh.read(4 * dim), dtype="<f4")
            fh.read(1)
    return _loaded(words, vectors, config)
