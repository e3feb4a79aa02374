"""Archive ingestion, cleaning, text-type derivation and corpus statistics.

Input is newline-delimited JSON as found in public Reddit archive dumps, either
plain, gzip- or zstd-compressed. Records become :class:`TextUnit` objects, one
per piece of text, which every later analysis consumes.
"""

from __future__ import annotations

import csv
import gzip
import io
import json
import logging
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

import numpy as np

from .errors import FormatError, UndefinedInputError

logger = logging.getLogger(__name__)

DELETION_SENTINELS = frozenset({"[deleted]", "[removed]"})
TEXT_TYPES = ("rpost", "rstitle", "rstext", "rcomm")
STATS_HEADER = ("community", "text_type", "n", "words", "mean", "max", "ttr")

# canonical field -> field name in the source dump
DEFAULT_SCHEMA = {
    "id": "id",
    "author": "author",
    "subreddit": "subreddit",
    "created_utc": "created_utc",
    "title": "title",
    "selftext": "selftext",
    "body": "body",
    "score": "score",
    "url": "url",
    "distinguished": "distinguished",
    "kind": "kind",
}


@dataclass(frozen=True)
class RedditRecord:
    id: str
    author: str
    subreddit: str
    created_utc: int
    kind: str  # "submission" | "comment"
    title: str | None = None
    selftext: str | None = None
    body: str | None = None
    score: int = 0
    url: str | None = None
    distinguished: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        if self.created_utc <= 0:
            raise ValueError(f"record {self.id}: created_utc must be positive")
        if self.kind == "submission" and self.title is None:
            raise ValueError(f"submission {self.id} has no title")
        if self.kind == "comment" and self.body is None:
            raise ValueError(f"comment {self.id} has no body")
        if self.kind not in ("submission", "comment"):
            raise ValueError(f"record {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class TextUnit:
    record_id: str
    community: str
    text_type: str
    text: str
    created_utc: int
    author: str
    score: int = 0
    distinguished: str | None = None

    @property
    def n_words(self) -> int:
        return len(self.text.split())


@dataclass(frozen=True)
class TypeStats:
    community: str
    text_type: str
    n: int
    words: int
    mean: float
    max: int
    ttr: float


def _open_text(source) -> TextIO:
    if hasattr(source, "read"):
        return source
    path = os.fspath(source)
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    if path.endswith(".zst"):
        try:
            import zstandard
        except ImportError as exc:  # pragma: no cover - depends on environment
            raise OSError("reading .zst dumps requires the 'zstandard' package") from exc
        fh = open(path, "rb")
        reader = zstandard.ZstdDecompressor(max_window_size=2**31).stream_reader(fh)
        return io.TextIOWrapper(reader, encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def _to_int(value) -> int:
    if value is None or value == "":
        raise ValueError("missing integer")
    return int(float(value))


def _record_from_obj(obj: Mapping, schema: Mapping[str, str]) -> RedditRecord:
    def get(field):
        return obj.get(schema.get(field, field))

    kind = get("kind")
    if kind not in ("submission", "comment"):
        # dumps keep submissions and comments in separate files; infer from fields
        if get("body") is not None:
            kind = "comment"
        elif get("title") is not None:
            kind = "submission"
        else:
            raise ValueError("cannot infer record kind")
    score = get("score")
    return RedditRecord(
        id=str(get("id") or ""),
        author=str(get("author") or ""),
        subreddit=str(get("subreddit") or ""),
        created_utc=_to_int(get("created_utc")),
        kind=kind,
        title=get("title"),
        selftext=get("selftext"),
        body=get("body"),
        score=int(score) if score is not None else 0,
        url=get("url"),
        distinguished=get("distinguished"),
    )


def iter_ingest(source, schema: Mapping[str, str] | None = None, stats: dict | None = None) -> Iterator[RedditRecord]:
    """Yield records from a newline-delimited JSON stream in input order.

    Malformed lines are skipped and counted in ``stats["skipped"]``. When more
    than half of the non-blank lines are malformed a :class:`FormatError` is
    raised once the stream is exhausted.
    """
    schema = {**DEFAULT_SCHEMA, **(schema or {})}
    stats = stats if stats is not None else {}
    stats.setdefault("lines", 0)
    stats.setdefault("skipped", 0)
    fh = _open_text(source)
    try:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            stats["lines"] += 1
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("not an object")
                record = _record_from_obj(obj, schema)
            except (ValueError, TypeError) as exc:
                stats["skipped"] += 1
                logger.debug("skipping line %d: %s", lineno, exc)
                continue
            yield record
    finally:
        if fh is not source:
            fh.close()
    if stats["lines"] and stats["skipped"] * 2 > stats["lines"]:
        raise FormatError(f"{stats['skipped']} of {stats['lines']} lines malformed")


def ingest(source, schema: Mapping[str, str] | None = None) -> tuple[list[RedditRecord], int]:
    """Read all records from ``source``; returns ``(records, n_skipped)``."""
    stats: dict = {}
    records = list(iter_ingest(source, schema, stats))
    return records, stats["skipped"]


def _text_fields(record: RedditRecord) -> list[str | None]:
    if record.kind == "comment":
        return [record.body]
    return [record.title, record.selftext]


def clean(records: Iterable[RedditRecord]) -> list[RedditRecord]:
    """Drop deleted/removed records and duplicate ids (first occurrence wins)."""
    seen = set()
    out = []
    for rec in records:
        if rec.author in DELETION_SENTINELS:
            continue
        if any(t is not None and t.strip() in DELETION_SENTINELS for t in _text_fields(rec)):
            continue
        if rec.id in seen:
            continue
        seen.add(rec.id)
        out.append(rec)
    return out


def derive_text_units(record: RedditRecord) -> list[TextUnit]:
    """Split a cleaned record into typed text units.

    Selfposts (non-empty selftext) give ``rstitle`` + ``rstext``; every other
    submission, including title-only posts without a url, gives one ``rpost``.
    Comments give one ``rcomm``. Empty texts are not emitted.
    """
    def unit(text_type, text):
        return TextUnit(
            record_id=record.id,
            community=record.subreddit,
            text_type=text_type,
            text=text,
            created_utc=record.created_utc,
            author=record.author,
            score=record.score,
            distinguished=record.distinguished,
        )

    if record.kind == "comment":
        body = (record.body or "").strip()
        return [unit("rcomm", body)] if body else []
    title = (record.title or "").strip()
    selftext = (record.selftext or "").strip()
    if selftext:
        units = [unit("rstitle", title)] if title else []
        units.append(unit("rstext", selftext))
        return units
    return [unit("rpost", title)] if title else []


def units_from_records(records: Iterable[RedditRecord]) -> list[TextUnit]:
    return [u for rec in records for u in derive_text_units(rec)]


def ttr(tokens: Sequence[str]) -> float:
    """Type-token ratio: distinct tokens over total tokens."""
    if len(tokens) == 0:
        raise UndefinedInputError("type-token ratio of an empty token sequence is undefined")
    return len(set(tokens)) / len(tokens)


def local_hour(created_utc: int, utc_offset_hours: int = 0) -> int:
    return (created_utc // 3600 + utc_offset_hours) % 24


def hourly_profile(units: Sequence[TextUnit], utc_offset_hours: int = 0) -> np.ndarray:
    """Share of units in each local hour bin 0..23."""
    if not units:
        raise UndefinedInputError("hourly profile needs at least one unit")
    counts = np.zeros(24, dtype=np.int64)
    for u in units:
        counts[local_hour(u.created_utc, utc_offset_hours)] += 1
    return counts / counts.sum()


def filter_authors(units: Iterable[TextUnit], patterns: Iterable[str] = ("spam", "bot"), drop_moderators: bool = True) -> list[TextUnit]:
    """Remove units by authors containing any pattern (case-insensitive substring).

    Substring matching is deliberate and over-matches (e.g. "Robotham").
    Moderator-distinguished units are removed too unless ``drop_moderators`` is off.
    """
    pats = [p.lower() for p in patterns if p]
    out = []
    for u in units:
        if drop_moderators and u.distinguished == "moderator":
            continue
        name = u.author.lower()
        if any(p in name for p in pats):
            continue
        out.append(u)
    return out


def filter_local_hours(units: Iterable[TextUnit], start_hour: int, end_hour: int, utc_offset: int = 0) -> list[TextUnit]:
    """Keep units whose local hour h satisfies ``start_hour <= h < end_hour``."""
    if not 0 <= start_hour < end_hour <= 24:
        raise ValueError(f"invalid hour window [{start_hour}, {end_hour})")
    return [u for u in units if start_hour <= local_hour(u.created_utc, utc_offset) < end_hour]


def corpus_stats(units: Iterable[TextUnit]) -> list[TypeStats]:
    """Per community x text-type counts, word totals and lexical diversity.

    Words are whitespace-delimited; TTR is computed over lowercased words.
    """
    groups: dict[tuple[str, str], list[TextUnit]] = defaultdict(list)
    for u in units:
        groups[(u.community, u.text_type)].append(u)
    rows = []
    for (community, text_type), members in sorted(groups.items(), key=lambda kv: (kv[0][0], TEXT_TYPES.index(kv[0][1]) if kv[0][1] in TEXT_TYPES else 99)):
        lengths = [u.n_words for u in members]
        tokens = [w.lower() for u in members for w in u.text.split()]
        total = sum(lengths)
        rows.append(TypeStats(
            community=community,
            text_type=text_type,
            n=len(members),
            words=total,
            mean=total / len(members),
            max=max(lengths),
            ttr=ttr(tokens) if tokens else 0.0,
        ))
    return rows


def write_stats_csv(stats: Iterable[TypeStats], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STATS_HEADER)
        for s in stats:
            w.writerow([s.community, s.text_type, s.n, s.words, f"{s.mean:.4f}", s.max, f"{s.ttr:.6f}"])


def write_units_jsonl(units: Iterable[TextUnit], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u in units:
            fh.write(json.dumps(u.__dict__, ensure_ascii=False, sort_keys=True) + "\n")


def read_units_jsonl(path) -> list[TextUnit]:
    with open(path, encoding="utf-8") as fh:
        return [TextUnit(**json.loads(line)) for line in fh if line.strip()]
