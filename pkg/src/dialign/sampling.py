"""Sampling procedures, length quantiles and temporal splits for classification runs.

Every sampler owns a ``random.Random(seed)`` and iterates classes in sorted
label order, so the same inputs and seed always give the same split.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

from .errors import SamplingError

PLANS = ("balanced", "proportional", "random")
DEFAULT_TEST_FRACTION = 0.2


@dataclass(frozen=True)
class SplitDataset:
    train: list
    test: list
    plan: str
    seed: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.plan not in PLANS:
            raise SamplingError(f"unknown plan {self.plan!r}")

    def class_counts(self, part: str = "train") -> dict:
        counts: dict = {}
        for _, label in getattr(self, part):
            counts[label] = counts.get(label, 0) + 1
        return dict(sorted(counts.items()))

    def plan_text(self) -> str:
        """Structured description sufficient to reproduce the draw."""
        body = {"plan": self.plan, "seed": self.seed, **self.meta}
        return json.dumps(body, sort_keys=True, indent=2) + "\n"


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _record_id(unit) -> Hashable:
    return getattr(unit, "record_id", id(unit))


def min_group_size(class_counts: Mapping[str, int]) -> int:
    """A quarter of the smallest class, rounded down."""
    if not class_counts or not any(c > 0 for c in class_counts.values()):
        raise SamplingError("all class counts are zero")
    return min(class_counts.values()) // 4


def _split(labelled: list, rng: random.Random, test_fraction: float) -> tuple[list, list]:
    """Stratified train/test split; ``labelled`` is already in sampled order."""
    by_class: dict = {}
    for unit, label in labelled:
        by_class.setdefault(label, []).append((unit, label))
    train, test = [], []
    for label in sorted(by_class):
        items = by_class[label]
        rng.shuffle(items)
        n_test = _round_half_up(len(items) * test_fraction)
        test.extend(items[:n_test])
        train.extend(items[n_test:])
    return train, test


def _check_fraction(test_fraction: float) -> None:
    if not 0.0 <= test_fraction < 1.0:
        raise SamplingError("test_fraction must be in [0, 1)")


def balanced_sample(units_by_class: Mapping[str, Sequence], seed: int, n_per_class: int | None = None,
                    test_fraction: float = DEFAULT_TEST_FRACTION) -> SplitDataset:
    """Exactly ``min_group_size`` units per class, drawn without replacement."""
    _check_fraction(test_fraction)
    counts = {k: len(v) for k, v in units_by_class.items()}
    n = min_group_size(counts) if n_per_class is None else n_per_class
    if n < 1:
        raise SamplingError(f"min group size is {n}; the smallest class has fewer than 4 units")
    rng = random.Random(seed)
    drawn = []
    for label in sorted(units_by_class):
        pool = list(units_by_class[label])
        if len(pool) < n:
            raise SamplingError(f"class {label!r} has {len(pool)} units, {n} requested")
        drawn.extend((u, label) for u in rng.sample(pool, n))
    train, test = _split(drawn, rng, test_fraction)
    return SplitDataset(train, test, "balanced", seed, {"mgs": n, "test_fraction": test_fraction})


def proportional_sample(units_by_class: Mapping[str, Sequence], fraction: float, seed: int,
                        test_fraction: float = DEFAULT_TEST_FRACTION) -> SplitDataset:
    """``round(count * fraction)`` units per class, preserving class ratios."""
    _check_fraction(test_fraction)
    if not 0.0 < fraction <= 1.0:
        raise SamplingError("fraction must be in (0, 1]")
    sizes = {label: _round_half_up(len(units_by_class[label]) * fraction) for label in units_by_class}
    if not any(sizes.values()):
        raise SamplingError(f"fraction {fraction} selects no units from any class")
    rng = random.Random(seed)
    drawn = []
    for label in sorted(units_by_class):
        pool = list(units_by_class[label])
        drawn.extend((u, label) for u in rng.sample(pool, sizes[label]))
    train, test = _split(drawn, rng, test_fraction)
    return SplitDataset(train, test, "proportional", seed,
                        {"fraction": fraction, "sizes": dict(sorted(sizes.items())), "test_fraction": test_fraction})


def random_sample(units_by_class: Mapping[str, Sequence], seed: int, n_classes: int | None = None,
                  mgs: int | None = None, test_fraction: float = DEFAULT_TEST_FRACTION) -> SplitDataset:
    """``mgs * n_classes`` units drawn from the pooled corpus regardless of class."""
    _check_fraction(test_fraction)
    counts = {k: len(v) for k, v in units_by_class.items()}
    n_classes = len(units_by_class) if n_classes is None else n_classes
    mgs = min_group_size(counts) if mgs is None else mgs
    total = mgs * n_classes
    pool = [(u, label) for label in sorted(units_by_class) for u in units_by_class[label]]
    if total < 1 or len(pool) < total:
        raise SamplingError(f"need {total} units, pool has {len(pool)}")
    rng = random.Random(seed)
    drawn = rng.sample(pool, total)
    train, test = _split(drawn, rng, test_fraction)
    return SplitDataset(train, test, "random", seed, {"mgs": mgs, "n_classes": n_classes, "test_fraction": test_fraction})


def _word_count(unit) -> int:
    if hasattr(unit, "n_words"):
        return unit.n_words
    return len(unit)


def length_quantiles(units: Sequence, k: int = 10, key: Callable | None = None) -> list[list]:
    """Sort by word count (stable) and cut into ``k`` near-equal buckets.

    The first ``len(units) % k`` buckets hold one extra unit.
    """
    if k < 2:
        raise SamplingError("k must be >= 2")
    if len(units) < k:
        raise SamplingError(f"{len(units)} units cannot fill {k} buckets")
    key = key or _word_count
    ordered = sorted(units, key=key)
    base, extra = divmod(len(ordered), k)
    out, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        out.append(ordered[start:start + size])
        start += size
    return out


def quarter_of(ts: int) -> tuple[int, int]:
    d = _dt.datetime.fromtimestamp(ts, _dt.timezone.utc)
    return d.year, (d.month - 1) // 3 + 1


@dataclass(frozen=True)
class TemporalSplit:
    train: list
    buckets: list  # (label "YYYYQn", units) in chronological order
    cutoff_ts: int


def temporal_split(units: Sequence, cutoff_ts: int, timestamp: Callable | None = None) -> TemporalSplit:
    """Units before the cutoff train; the rest fall into calendar quarters.

    A unit stamped exactly at the cutoff goes to the test side. Quarters with
    no units between the first and last test quarter are kept as empty buckets.
    """
    timestamp = timestamp or (lambda u: u.created_utc)
    ordered = sorted(units, key=timestamp)
    train = [u for u in ordered if timestamp(u) < cutoff_ts]
    rest = [u for u in ordered if timestamp(u) >= cutoff_ts]
    if not train:
        raise SamplingError("no units before the cutoff")
    if not rest:
        raise SamplingError("cutoff lies after the last unit")
    y0, q0 = quarter_of(cutoff_ts)
    y1, q1 = quarter_of(timestamp(rest[-1]))
    n_buckets = (y1 - y0) * 4 + (q1 - q0) + 1
    buckets = []
    for i in range(n_buckets):
        y, q = y0 + (q0 - 1 + i) // 4, (q0 - 1 + i) % 4 + 1
        buckets.append([f"{y}Q{q}", []])
    for u in rest:
        y, q = quarter_of(timestamp(u))
        buckets[(y - y0) * 4 + (q - q0)][1].append(u)
    return TemporalSplit(train, [tuple(b) for b in buckets], cutoff_ts)
