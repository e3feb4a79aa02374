"""Equal-volume period partitions, diachronic embedding series and shift detection."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .embed import EmbeddingModel, TrainConfig, cosine
from .embed import train as train_embedding
from .errors import TrainingError, UndefinedInputError, ValidationError
from .textprep.text import normalize, tokenize

OOV = "OOV"
INCREASING, DECREASING, NO_TREND = "increasing", "decreasing", "none"


@dataclass(frozen=True)
class PeriodPartition:
    periods: list  # list of lists of units, chronological
    words: list[int]

    @property
    def k(self) -> int:
        return len(self.periods)

    def bounds(self, timestamp: Callable | None = None) -> list[tuple[int, int]]:
        timestamp = timestamp or (lambda u: u.created_utc)
        return [(timestamp(p[0]), timestamp(p[-1])) for p in self.periods]

    def manifest_rows(self) -> list[list[str]]:
        rows = [["period", "start_ts", "end_ts", "words"]]
        for i, ((lo, hi), w) in enumerate(zip(self.bounds(), self.words), start=1):
            rows.append([str(i), str(lo), str(hi), str(w)])
        return rows


def _unit_words(unit) -> int:
    return unit.n_words if hasattr(unit, "n_words") else len(unit)


def partition_equal_words(units: Sequence, k: int, word_count: Callable | None = None,
                          timestamp: Callable | None = None) -> PeriodPartition:
    """Chronological periods with near-equal word totals.

    Units are sorted by time (stable). The ``i``-th cut falls after the unit
    whose cumulative word count is nearest ``i * total / k`` (earlier unit on
    ties), constrained so that every period keeps at least one unit.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    if len(units) < k:
        raise ValidationError(f"{len(units)} units cannot fill {k} periods")
    word_count = word_count or _unit_words
    timestamp = timestamp or (lambda u: u.created_utc)
    ordered = sorted(units, key=timestamp)
    cum = np.cumsum([word_count(u) for u in ordered])
    total = int(cum[-1]) if len(cum) else 0
    n = len(ordered)
    cuts = []
    prev = 0
    for i in range(1, k):
        target = i * total / k
        # candidate cut positions (number of units in the first i periods)
        lo, hi = prev + 1, n - (k - i)
        positions = np.arange(lo, hi + 1)
        dist = np.abs(cum[positions - 1] - target)
        best = int(positions[int(np.argmin(dist))])
        cuts.append(best)
        prev = best
    edges = [0, *cuts, n]
    periods = [ordered[a:b] for a, b in zip(edges, edges[1:])]
    words = [int(sum(word_count(u) for u in p)) for p in periods]
    return PeriodPartition(periods, words)


def _docs(period: Sequence) -> list[list[str]]:
    out = []
    for item in period:
        if hasattr(item, "text"):
            out.append(list(tokenize(normalize(item.text)).tokens))
        elif hasattr(item, "tokens"):
            out.append(list(item.tokens))
        else:
            out.append(list(item))
    return out


def _train_period(i: int, docs, config: TrainConfig, init: EmbeddingModel | None) -> EmbeddingModel:
    try:
        return train_embedding(docs, config, init=init)
    except (TrainingError, ValidationError) as exc:
        raise TrainingError(f"period {i + 1}: {exc}") from exc


def _periods(partition) -> list:
    return partition.periods if isinstance(partition, PeriodPartition) else list(partition)


def train_sequential(partition, config: TrainConfig) -> list[EmbeddingModel]:
    """Independent models; period ``i`` (0-based) is seeded with ``config.seed + i``."""
    return [_train_period(i, _docs(p), replace(config, seed=config.seed + i), None)
            for i, p in enumerate(_periods(partition))]


def train_incremental(partition, config: TrainConfig) -> list[EmbeddingModel]:
    """Each model starts from the previous period's model."""
    models: list[EmbeddingModel] = []
    for i, p in enumerate(_periods(partition)):
        init = models[-1] if models else None
        models.append(_train_period(i, _docs(p), replace(config, seed=config.seed + i), init))
    return models


@dataclass(frozen=True)
class DiachronicSeries:
    source: str
    target: str
    values: list  # float per period, None where either word is out of vocabulary
    mode: str = "incremental"

    def cells(self) -> list[str]:
        return [OOV if v is None else f"{v:.6f}" for v in self.values]

    @property
    def trend(self) -> str:
        try:
            return monotonic_trend(self.values)
        except UndefinedInputError:
            return NO_TREND


def shift_series(models: Sequence[EmbeddingModel], source: str, targets: Sequence[str],
                 mode: str = "incremental") -> list[DiachronicSeries]:
    if not any(source in m for m in models):
        raise UndefinedInputError(f"{source!r} is out of vocabulary in every period")
    out = []
    for target in targets:
        values = [cosine(m, source, target) if source in m and target in m else None for m in models]
        out.append(DiachronicSeries(source, target, values, mode))
    return out


def monotonic_trend(series: Sequence) -> str:
    """Non-strict monotonicity over scored periods; ``increasing`` is tested first."""
    scored = [v for v in series if v is not None]
    if len(scored) < 2:
        raise UndefinedInputError("need at least two scored periods")
    steps = np.diff(np.asarray(scored, dtype=np.float64))
    if np.all(steps >= 0):
        return INCREASING
    if np.all(steps <= 0):
        return DECREASING
    return NO_TREND


def drift(series: Sequence) -> float:
    """Largest absolute deviation of a scored value from the first scored value."""
    scored = [v for v in series if v is not None]
    return float(max(abs(v - scored[0]) for v in scored)) if scored else 0.0


def write_series_csv(series: Sequence[DiachronicSeries], path) -> None:
    k = max((len(s.values) for s in series), default=0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "target", *[f"period_{i}" for i in range(1, k + 1)], "trend"])
        for s in series:
            w.writerow([s.source, s.target, *s.cells(), s.trend])


def write_manifest_csv(partition: PeriodPartition, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(partition.manifest_rows())
