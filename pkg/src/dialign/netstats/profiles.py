"""Per-user behavioural profiles and rank-based decile cohorts."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import ValidationError

SECONDS_PER_DAY = 86_400
PROFILE_HEADER = ["author", "first_ts", "last_ts", "lifespan_days", "score", "interactions", "ratio",
                  "lifespan_decile", "engagement_decile"]


@dataclass(frozen=True)
class UserProfile:
    author: str
    first_ts: int
    last_ts: int
    total_score: int
    interactions: int
    lifespan_decile: int | None = None
    engagement_decile: int | None = None

    @property
    def lifespan_days(self) -> float:
        return (self.last_ts - self.first_ts) / SECONDS_PER_DAY

    @property
    def engagement_ratio(self) -> float:
        return self.total_score / self.interactions

    def row(self) -> list[str]:
        return [self.author, str(self.first_ts), str(self.last_ts), f"{self.lifespan_days:.6f}",
                str(self.total_score), str(self.interactions), f"{self.engagement_ratio:.6f}",
                str(self.lifespan_decile or ""), str(self.engagement_decile or "")]


def build_profiles(units: Iterable, drop_moderators: bool = True) -> list[UserProfile]:
    """Aggregate text units into one profile per author, sorted by author.

    A selfpost yields a title and a body unit; both belong to one record, so
    interactions and scores are counted per distinct record id.
    """
    seen: dict[str, dict[str, tuple[int, int]]] = {}
    for u in units:
        if drop_moderators and getattr(u, "distinguished", None) == "moderator":
            continue
        seen.setdefault(u.author, {})[u.record_id] = (u.created_utc, u.score)
    out = []
    for author in sorted(seen):
        recs = seen[author].values()
        ts = [t for t, _ in recs]
        out.append(UserProfile(author, min(ts), max(ts), sum(s for _, s in recs), len(recs)))
    return _with_deciles(out) if len(out) >= 10 else out


def decile_assign(values: Sequence[float], keys: Sequence[str] | None = None) -> list[int]:
    """Deciles 1..10 by rank; decile 1 holds the highest values.

    Ties are broken by ``keys`` (ascending), defaulting to input position.
    Decile of rank r (0 = highest) among n is floor(10 r / n) + 1.
    """
    n = len(values)
    if n < 10:
        raise ValidationError(f"decile assignment needs at least 10 values, got {n}")
    keys = list(keys) if keys is not None else list(range(n))
    order = sorted(range(n), key=lambda i: (-values[i], keys[i]))
    out = [0] * n
    for rank, i in enumerate(order):
        out[i] = rank * 10 // n + 1
    return out


def _with_deciles(profiles: list[UserProfile]) -> list[UserProfile]:
    authors = [p.author for p in profiles]
    life = decile_assign([p.lifespan_days for p in profiles], authors)
    eng = decile_assign([p.engagement_ratio for p in profiles], authors)
    return [UserProfile(p.author, p.first_ts, p.last_ts, p.total_score, p.interactions, a, b)
            for p, a, b in zip(profiles, life, eng)]


def cohort_means(profiles: Sequence[UserProfile], values: Mapping[str, float],
                 by: str = "lifespan") -> dict[int, float]:
    """Mean of a per-user measure within each decile cohort (cohorts without values are omitted)."""
    attr = "lifespan_decile" if by == "lifespan" else "engagement_decile"
    groups: dict[int, list[float]] = {}
    for p in profiles:
        d = getattr(p, attr)
        if d is not None and p.author in values:
            groups.setdefault(d, []).append(values[p.author])
    return {d: float(np.mean(v)) for d, v in sorted(groups.items())}


def write_profiles_csv(profiles: Iterable[UserProfile], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(PROFILE_HEADER)
        for p in profiles:
            out.writerow(p.row())
