"""Construction grammar features: slot-constraint sequences, matching, parsing and a simple miner.

A construction is a sequence of 2-4 slots. Each slot constrains one token by
its form (``lex:of``), its part-of-speech tag (``syn:V``) or its semantic
cluster (``sem:17``). Constructicon files hold one construction per line as
``id<TAB>slot;slot;...``.
"""

from __future__ import annotations

import csv
import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import AnnotationError, FormatError, ValidationError
from .netstats import Graph, kmeans
from .textprep.text import TokenizedDoc
from .variables import month_key

KINDS = ("lex", "syn", "sem")
MIN_LEN, MAX_LEN = 2, 4
LEX_ONLY, SYN_ONLY, SEM_PLUS = "LEX_only", "SYN_only", "SEM_plus"
# coarse class names usable in syn slots; a trailing * is a tag prefix
SYN_ALIASES = {"V": "VB*", "N": "NN*", "ADJ": "JJ", "ADV": "RB", "ADP": "IN", "PRON": "PRP", "DET": "DET",
               "MOD": "MOD"}


@dataclass(frozen=True)
class SlotConstraint:
    kind: str
    value: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown slot kind {self.kind!r}")
        if not self.value:
            raise ValidationError("empty slot value")
        if self.kind == "sem" and not self.value.isdigit():
            raise ValidationError(f"sem slot needs a cluster id, got {self.value!r}")

    @classmethod
    def parse(cls, text: str) -> "SlotConstraint":
        kind, sep, value = text.strip().partition(":")
        if not sep:
            raise FormatError(f"slot {text!r} lacks a kind prefix")
        return cls(kind.lower(), value)

    def __str__(self):
        return f"{self.kind}:{self.value}"

    def matches(self, token: str, tag: str | None, sem: int | None) -> bool:
        if self.kind == "lex":
            return token == self.value
        if self.kind == "syn":
            pattern = SYN_ALIASES.get(self.value, self.value)
            if pattern.endswith("*"):
                return tag is not None and tag.startswith(pattern[:-1])
            return tag == pattern
        return sem is not None and sem == int(self.value)


@dataclass(frozen=True)
class Construction:
    id: str
    slots: tuple[SlotConstraint, ...]

    def __post_init__(self):
        if not isinstance(self.slots, tuple):
            object.__setattr__(self, "slots", tuple(self.slots))
        if not MIN_LEN <= len(self.slots) <= MAX_LEN:
            raise ValidationError(f"construction {self.id!r} has {len(self.slots)} slots (2-4 allowed)")

    @classmethod
    def parse(cls, cid: str, text: str) -> "Construction":
        return cls(cid, tuple(SlotConstraint.parse(s) for s in text.split(";") if s.strip()))

    def __len__(self):
        return len(self.slots)

    @property
    def pattern(self) -> str:
        return ";".join(map(str, self.slots))

    @property
    def kinds(self) -> set[str]:
        return {s.kind for s in self.slots}

    @property
    def feature_set(self) -> str:
        """LEX_only: lexical slots only; SYN_only: uses tags but no clusters; SEM_plus: uses clusters."""
        if "sem" in self.kinds:
            return SEM_PLUS
        return SYN_ONLY if "syn" in self.kinds else LEX_ONLY


@dataclass(frozen=True)
class Constructicon:
    constructions: tuple[Construction, ...]
    provenance: str = "loaded"
    scores: Mapping[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not isinstance(self.constructions, tuple):
            object.__setattr__(self, "constructions", tuple(self.constructions))
        ids = [c.id for c in self.constructions]
        if len(set(ids)) != len(ids):
            raise ValidationError("construction ids must be unique")

    def __len__(self):
        return len(self.constructions)

    def __iter__(self):
        return iter(self.constructions)

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.constructions]

    def by_feature_set(self) -> dict[str, list[Construction]]:
        out: dict[str, list[Construction]] = {LEX_ONLY: [], SYN_ONLY: [], SEM_PLUS: []}
        for c in self.constructions:
            out[c.feature_set].append(c)
        return out

    def patterns(self) -> set[str]:
        return {c.pattern for c in self.constructions}

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for c in self.constructions:
                fh.write(f"{c.id}\t{c.pattern}\n")

    @classmethod
    def load(cls, path) -> "Constructicon":
        out = []
        with open(path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                cid, sep, pattern = line.partition("\t")
                if not sep:
                    raise FormatError(f"{path}:{n}: expected id<TAB>slots")
                out.append(Construction.parse(cid, pattern))
        return cls(tuple(out), "loaded")


# --- annotated documents ----------------------------------------------------

@dataclass(frozen=True)
class AnnotatedDoc:
    tokens: tuple[str, ...]
    tags: tuple[str, ...] | None = None
    sem: tuple[int | None, ...] | None = None
    origin: object = field(default=None, compare=False)

    def __len__(self):
        return len(self.tokens)

    def layers(self) -> set[str]:
        out = {"lex"}
        if self.tags is not None:
            out.add("syn")
        if self.sem is not None:
            out.add("sem")
        return out


def annotate(doc, sem_map: Mapping[str, int] | None = None) -> AnnotatedDoc:
    """Lift a tokenized (optionally tagged) document, adding cluster ids when a map is given."""
    if isinstance(doc, AnnotatedDoc):
        tokens, tags, origin = doc.tokens, doc.tags, doc.origin
    elif isinstance(doc, TokenizedDoc):
        tokens, tags, origin = doc.tokens, doc.tags, doc.origin
    else:
        tokens, tags, origin = tuple(doc), None, None
    sem = None if sem_map is None else tuple(sem_map.get(t) for t in tokens)
    return AnnotatedDoc(tuple(tokens), tags, sem, origin)


def _require(doc: AnnotatedDoc, kinds: set[str]) -> None:
    missing = kinds - doc.layers()
    if missing:
        raise AnnotationError(f"document lacks annotation layer(s): {', '.join(sorted(missing))}")


def match(doc: AnnotatedDoc, construction: Construction) -> int:
    """Number of (possibly overlapping) token windows satisfying every slot."""
    _require(doc, construction.kinds)
    n, k = len(doc.tokens), len(construction.slots)
    tags = doc.tags or (None,) * n
    sem = doc.sem or (None,) * n
    count = 0
    for i in range(n - k + 1):
        if all(s.matches(doc.tokens[i + j], tags[i + j], sem[i + j]) for j, s in enumerate(construction.slots)):
            count += 1
    return count


# --- parsing into frequency vectors -----------------------------------------

def group_community_month(doc) -> str:
    o = doc.origin
    return f"{o.community}|{month_key(o.created_utc)}"


def group_user(doc) -> str:
    return doc.origin.author


GROUPINGS: dict[str, Callable] = {"community_month": group_community_month, "user": group_user}


@dataclass(frozen=True)
class CountVectors:
    groups: list[str]
    ids: list[str]
    counts: np.ndarray  # groups x constructions, int64
    tokens: np.ndarray  # tokens per group

    def rates(self) -> np.ndarray:
        """Occurrences per 1,000 tokens (zero for empty groups)."""
        denom = np.where(self.tokens > 0, self.tokens, 1)[:, None]
        return self.counts * 1000.0 / denom

    def vector(self, group: str) -> np.ndarray:
        return self.counts[self.groups.index(group)]

    def write_csv(self, path, normalized: bool = False) -> None:
        values = self.rates() if normalized else self.counts
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["group", "tokens", *self.ids])
            for g, t, row in zip(self.groups, self.tokens, values):
                cells = [f"{v:.6f}" for v in row] if normalized else [str(int(v)) for v in row]
                out.writerow([g, int(t), *cells])


def parse_counts(corpus: Iterable[AnnotatedDoc], constructicon: Constructicon,
                 group_by: str | Callable = "community_month", groups: Sequence[str] | None = None) -> CountVectors:
    """Construction frequencies per group; listed ``groups`` with no documents get zero vectors."""
    key = GROUPINGS[group_by] if isinstance(group_by, str) else group_by
    ids = constructicon.ids
    rows: dict[str, np.ndarray] = {g: np.zeros(len(ids), dtype=np.int64) for g in groups or ()}
    tokens: dict[str, int] = {g: 0 for g in groups or ()}
    for doc in corpus:
        g = key(doc)
        if g not in rows:
            rows[g] = np.zeros(len(ids), dtype=np.int64)
            tokens[g] = 0
        tokens[g] += len(doc)
        for j, c in enumerate(constructicon):
            rows[g][j] += match(doc, c)
    names = list(groups) if groups is not None else sorted(rows)
    names += sorted(set(rows) - set(names))
    counts = np.array([rows[g] for g in names], dtype=np.int64).reshape(len(names), len(ids))
    return CountVectors(names, ids, counts, np.array([tokens[g] for g in names], dtype=np.int64))


# --- semantic clusters ------------------------------------------------------

def induce_sem_clusters(model, k: int = 256, seed: int = 0) -> dict[str, int]:
    """Cluster id per vocabulary token via k-means over unit-length vectors."""
    n = len(model.words)
    if k < 1 or k > n:
        raise ValidationError(f"k={k} must lie in 1..{n} (vocabulary size)")
    result = kmeans(model.unit_vectors(), k, seed=seed)
    return {w: int(c) for w, c in zip(model.words, result.labels)}


# --- similarity network -----------------------------------------------------

def similarity_network(vectors: Mapping[str, Sequence[float]], threshold: float) -> Graph:
    """Groups as nodes; edges where the cosine of their vectors is >= threshold."""
    names = list(vectors)
    if len(names) < 2:
        raise ValidationError("need at least two vectors")
    mat = np.array([np.asarray(vectors[n], dtype=np.float64) for n in names])
    norms = np.linalg.norm(mat, axis=1)
    g = Graph(list(names))
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            if norms[i] == 0 or norms[j] == 0:
                continue
            cos = float(np.clip(mat[i] @ mat[j] / (norms[i] * norms[j]), -1.0, 1.0))
            if cos >= threshold:
                g.add_edge(names[i], names[j], cos)
    return g


# --- mining -----------------------------------------------------------------

@dataclass(frozen=True)
class MinerConfig:
    rounds: int = 5
    min_freq: int = 5
    association_threshold: float = 0.5
    kinds: tuple[str, ...] = KINDS


def _slot_options(doc: AnnotatedDoc, kinds: Sequence[str]) -> list[tuple[SlotConstraint, ...]]:
    out = []
    for i, tok in enumerate(doc.tokens):
        opts = []
        if "lex" in kinds:
            opts.append(SlotConstraint("lex", tok))
        if "syn" in kinds and doc.tags is not None:
            opts.append(SlotConstraint("syn", doc.tags[i]))
        if "sem" in kinds and doc.sem is not None and doc.sem[i] is not None:
            opts.append(SlotConstraint("sem", str(doc.sem[i])))
        out.append(tuple(opts))
    return out


def delta_p(joint: int, prefix: int, last: int, windows: int) -> float:
    """P(last | prefix) - P(last | not prefix) over ``windows`` equal-length windows."""
    if prefix == 0:
        return 0.0
    rest = windows - prefix
    return joint / prefix - ((last - joint) / rest if rest > 0 else 0.0)


def _slot_key(slot: SlotConstraint) -> tuple[int, str]:
    return KINDS.index(slot.kind), slot.value


def mine_constructions(corpus: Iterable[AnnotatedDoc], config: MinerConfig | None = None) -> Constructicon:
    """Grow slot sequences one slot per round and keep strongly associated ones.

    Round r scores sequences of length r + 1 (capped at 4) whose prefix
    passed the previous round's frequency and association filters. A sequence is kept when it occurs at least
    ``min_freq`` times and its forward association dP(last slot | prefix) is
    at least ``association_threshold``. Among kept sequences of one length,
    one whose set of matched windows equals another's with a strictly higher
    score is pruned as subsumed. Slots use exact tags and cluster ids.
    """
    config = config or MinerConfig()
    docs = [_slot_options(d, config.kinds) for d in corpus]
    kept: dict[tuple[SlotConstraint, ...], float] = {}
    frontier: set[tuple[SlotConstraint, ...]] | None = None
    for rnd in range(1, config.rounds + 1):
        length = rnd + 1
        if length > MAX_LEN or frontier == set():
            break
        joint: Counter = Counter()
        prefix_c: Counter = Counter()
        last_c: Counter = Counter()
        occurrences: dict[tuple, list] = defaultdict(list)
        windows = 0
        for d, opts in enumerate(docs):
            for i in range(len(opts) - length + 1):
                windows += 1
                for s in opts[i + length - 1]:
                    last_c[s] += 1
                for pre in itertools.product(*opts[i:i + length - 1]):
                    if frontier is not None and pre not in frontier:
                        continue
                    prefix_c[pre] += 1
                    for s in opts[i + length - 1]:
                        seq = pre + (s,)
                        joint[seq] += 1
                        occurrences[seq].append((d, i))
        scored = {}
        for seq, c in joint.items():
            if c < config.min_freq:
                continue
            score = delta_p(c, prefix_c[seq[:-1]], last_c[seq[-1]], windows)
            if score >= config.association_threshold:
                scored[seq] = score
        by_cover: dict[tuple, list] = defaultdict(list)
        for seq in scored:
            by_cover[tuple(occurrences[seq])].append(seq)
        survivors = {}
        for group in by_cover.values():
            best = max(scored[s] for s in group)
            for s in group:
                if scored[s] == best:
                    survivors[s] = scored[s]
        kept.update(survivors)
        frontier = set(scored)
    ordered = sorted(kept, key=lambda s: (len(s), -kept[s], [_slot_key(x) for x in s]))
    cons = tuple(Construction(f"c{i + 1}", seq) for i, seq in enumerate(ordered))
    return Constructicon(cons, "mined", {c.id: kept[c.slots] for c in cons})
