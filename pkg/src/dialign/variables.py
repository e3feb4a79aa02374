"""Sociolinguistic variable counting, proportion tables and distribution patterns.

A variable groups two or more variants, each marked conservative or
innovative and realised by one or more surface forms (single tokens or
adjacent token pairs). Counting runs on the raw token stream: within one
variable the longest form wins at each position and matched tokens are
consumed, so ``tea towel`` is not also counted as ``tea`` by the same variable.
Different variables are counted independently.
"""

from __future__ import annotations

import csv
import datetime as _dt
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import local_hour
from .errors import AnnotationError, ValidationError
from .textprep.text import TokenizedDoc

CATEGORIES = ("lexical", "morphosyntactic", "semantic")
ROLES = ("conservative", "innovative")
SPEC_HEADER = ["variable", "category", "variant_label", "role", "surface_form", "pos"]

CONSERVATIVE_DOMINANT = "conservative_dominant"
INNOVATIVE_DOMINANT = "innovative_dominant"
COMMUNITY_GROUPING = "community_grouping"
COMMUNITY_OUTLIER = "community_outlier"


@dataclass(frozen=True)
class Variant:
    label: str
    role: str
    surface_forms: tuple[tuple[str, ...], ...]
    pos: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValidationError(f"variant {self.label!r}: unknown role {self.role!r}")
        if not self.surface_forms:
            raise ValidationError(f"variant {self.label!r} has no surface forms")
        for form in self.surface_forms:
            if not 1 <= len(form) <= 2:
                raise ValidationError(f"variant {self.label!r}: surface form {form!r} must be one or two tokens")
            if any(t != t.lower() for t in form):
                raise ValidationError(f"variant {self.label!r}: surface form {form!r} must be lowercase")


@dataclass(frozen=True)
class VariableSpec:
    id: str
    category: str
    variants: tuple[Variant, ...]

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValidationError(f"{self.id}: unknown category {self.category!r}")
        if len(self.variants) < 2:
            raise ValidationError(f"{self.id}: needs at least two variants")
        roles = {v.role for v in self.variants}
        for role in ROLES:
            if role not in roles:
                raise ValidationError(f"{self.id}: no {role} variant")
        labels = [v.label for v in self.variants]
        if len(set(labels)) != len(labels) and self.category != "semantic":
            raise ValidationError(f"{self.id}: duplicate variant labels")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(v.label for v in self.variants)

    @property
    def source(self) -> str:
        """Source word for semantic variables (``SEM_TEA`` -> ``tea``)."""
        return self.id.split("_", 1)[-1].lower()

    def role_of(self, label: str) -> str:
        for v in self.variants:
            if v.label == label:
                return v.role
        raise KeyError(label)

    def forms_by_role(self, role: str) -> list[str]:
        return [" ".join(f) for v in self.variants if v.role == role for f in v.surface_forms]


def load_specs(path=None) -> list[VariableSpec]:
    """Read a spec file; ``None`` loads the bundled inventory.

    Rows for one variable must be contiguous. Rows sharing a variable and
    variant label are merged into one variant with several surface forms.
    """
    if path is None:
        text = (resources.files("dialign") / "data" / "variables.csv").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    rows = list(csv.reader(text.splitlines()))
    if rows and [c.strip() for c in rows[0]] == SPEC_HEADER:
        rows = rows[1:]
    order: list[str] = []
    grouped: dict[str, dict] = {}
    for lineno, row in enumerate(rows, start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) != len(SPEC_HEADER):
            raise ValidationError(f"line {lineno}: expected {len(SPEC_HEADER)} columns, got {len(row)}")
        var, cat, label, role, form, pos = (c.strip() for c in row)
        if var not in grouped:
            order.append(var)
            grouped[var] = {"category": cat, "variants": {}}
        elif order[-1] != var:
            raise ValidationError(f"line {lineno}: duplicate variable id {var!r}")
        entry = grouped[var]
        if entry["category"] != cat:
            raise ValidationError(f"line {lineno}: {var} has conflicting categories")
        variants = entry["variants"]
        if label not in variants:
            variants[label] = {"role": role, "forms": [], "pos": pos or None}
        elif variants[label]["role"] != role or variants[label]["pos"] != (pos or None):
            raise ValidationError(f"line {lineno}: {var}/{label} has conflicting role or pos")
        variants[label]["forms"].append(tuple(form.split()))
    specs = []
    for var in order:
        entry = grouped[var]
        variants = tuple(
            Variant(label, d["role"], tuple(d["forms"]), d["pos"]) for label, d in entry["variants"].items()
        )
        specs.append(VariableSpec(var, entry["category"], variants))
    return specs


def specs_by_id(specs: Sequence[VariableSpec]) -> dict[str, VariableSpec]:
    return {s.id: s for s in specs}


class FormMatcher:
    """Longest-match-first scanner over one group of mutually exclusive forms."""

    def __init__(self, forms: Mapping[tuple[str, ...], tuple[str, str | None]]):
        self.index = dict(forms)
        self.needs_tags = any(pos for _, pos in self.index.values())

    @classmethod
    def from_spec(cls, spec: VariableSpec) -> "FormMatcher":
        forms = {}
        for v in spec.variants:
            for form in v.surface_forms:
                forms.setdefault(form, (v.label, v.pos))
        return cls(forms)

    def count(self, tokens: Sequence[str], tags: Sequence[str] | None = None) -> Counter:
        if self.needs_tags and tags is None:
            raise AnnotationError("POS-constrained variable requires tagged documents")
        out: Counter = Counter()
        i, n = 0, len(tokens)
        while i < n:
            for size in (2, 1):
                if i + size > n:
                    continue
                hit = self.index.get(tuple(tokens[i:i + size]))
                if hit is None:
                    continue
                label, pos = hit
                # the constraint applies to the last (head) token of the form
                if pos and not tags[i + size - 1].startswith(pos):
                    continue
                out[label] += 1
                i += size
                break
            else:
                i += 1
        return out


@dataclass
class VariantCounts:
    """Token frequencies per (community, variable, variant label)."""

    specs: tuple[VariableSpec, ...]
    counts: Counter = field(default_factory=Counter)

    @property
    def communities(self) -> list[str]:
        return sorted({c for c, _, _ in self.counts})

    def n(self, community: str, variable: str, label: str) -> int:
        return self.counts.get((community, variable, label), 0)

    def total(self, community: str, variable: str) -> int:
        spec = specs_by_id(self.specs)[variable]
        return sum(self.n(community, variable, lab) for lab in spec.labels)

    def variant_total(self, variable: str, label: str) -> int:
        return sum(v for (_, var, lab), v in self.counts.items() if var == variable and lab == label)

    def proportions(self, community: str, variable: str) -> dict[str, float | None]:
        """Percentages over the variable's variants; ``None`` when the community has no tokens."""
        spec = specs_by_id(self.specs)[variable]
        total = self.total(community, variable)
        if total == 0:
            return {lab: None for lab in spec.labels}
        return {lab: 100.0 * self.n(community, variable, lab) / total for lab in spec.labels}

    def conservative_share(self, community: str, variable: str) -> float | None:
        spec = specs_by_id(self.specs)[variable]
        props = self.proportions(community, variable)
        if all(p is None for p in props.values()):
            return None
        return sum(p for lab, p in props.items() if spec.role_of(lab) == "conservative")

    def __add__(self, other: "VariantCounts") -> "VariantCounts":
        if [s.id for s in self.specs] != [s.id for s in other.specs]:
            raise ValueError("cannot merge counts over different inventories")
        return VariantCounts(self.specs, self.counts + other.counts)


def _community(doc) -> str:
    origin = getattr(doc, "origin", None)
    if origin is None or not hasattr(origin, "community"):
        raise AnnotationError("document has no community; pass (community, doc) pairs")
    return origin.community


def _iter_labelled(corpus) -> Iterable[tuple[str, TokenizedDoc]]:
    for item in corpus:
        if isinstance(item, tuple):
            yield item
        else:
            yield _community(item), item


def count_variants(corpus: Iterable, specs: Sequence[VariableSpec]) -> VariantCounts:
    """Count variant tokens per community.

    ``corpus`` yields tokenized docs whose ``origin`` carries a community, or
    ``(community, doc)`` pairs. Docs must be tagged if any spec has a POS constraint.
    """
    specs = tuple(specs)
    matchers = [(s.id, FormMatcher.from_spec(s)) for s in specs]
    counts: Counter = Counter()
    for community, doc in _iter_labelled(corpus):
        for var, matcher in matchers:
            for label, c in matcher.count(doc.tokens, doc.tags).items():
                counts[(community, var, label)] += c
    return VariantCounts(specs, counts)


def format_pct(value: float | None) -> str:
    return "-" if value is None or value == 0 else f"{value:.1f}"


def table_rows(counts: VariantCounts, communities: Sequence[str] | None = None) -> list[list[str]]:
    """Rows ``variable, variant, <pct per community>, n``; zero cells render ``-``."""
    communities = list(communities) if communities is not None else counts.communities
    rows = [["variable", "variant", *communities, "n"]]
    for spec in counts.specs:
        props = {c: counts.proportions(c, spec.id) for c in communities}
        for label in spec.labels:
            cells = [format_pct(props[c][label]) for c in communities]
            rows.append([spec.id, label, *cells, str(counts.variant_total(spec.id, label))])
    return rows


def write_table_csv(counts: VariantCounts, path, communities: Sequence[str] | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(table_rows(counts, communities))


@dataclass(frozen=True)
class DistributionPattern:
    variable: str
    pattern: str
    groups: dict = field(default_factory=dict, compare=False)


def _majority(share: float) -> str:
    if share > 50.0:
        return "conservative"
    if share < 50.0:
        return "innovative"
    return "tie"


def classify_shares(shares: Mapping[str, float | None], variable: str = "") -> DistributionPattern:
    """Pattern from per-community conservative shares (percent).

    Communities with no tokens (``None``) are left out. An outlier needs at
    least three scored communities: exactly one deviates from a majority
    shared by all the others.
    """
    scored = {c: s for c, s in shares.items() if s is not None}
    if len(scored) < 2:
        raise ValidationError(f"{variable}: need proportions for at least two communities")
    majority = {c: _majority(s) for c, s in sorted(scored.items())}
    by_label: dict[str, list[str]] = defaultdict(list)
    for c, lab in majority.items():
        by_label[lab].append(c)
    if set(by_label) == {"conservative"}:
        return DistributionPattern(variable, CONSERVATIVE_DOMINANT, dict(by_label))
    if set(by_label) == {"innovative"}:
        return DistributionPattern(variable, INNOVATIVE_DOMINANT, dict(by_label))
    if len(scored) >= 3 and len(by_label) == 2:
        (lab_a, grp_a), (lab_b, grp_b) = sorted(by_label.items(), key=lambda kv: len(kv[1]))
        if len(grp_a) == 1:
            return DistributionPattern(variable, COMMUNITY_OUTLIER, {"outlier": grp_a[0], "majority": lab_b, lab_b: grp_b, lab_a: grp_a})
    return DistributionPattern(variable, COMMUNITY_GROUPING, dict(by_label))


def classify_distribution(counts: VariantCounts, variable: str, communities: Sequence[str] | None = None) -> DistributionPattern:
    communities = list(communities) if communities is not None else counts.communities
    return classify_shares({c: counts.conservative_share(c, variable) for c in communities}, variable)


def share_matrix(counts: VariantCounts, variables: Sequence[str], communities: Sequence[str]) -> np.ndarray:
    """Conservative share (0..1) per variable × community; missing cells filled with the row mean."""
    mat = np.full((len(variables), len(communities)), np.nan)
    for i, var in enumerate(variables):
        for j, c in enumerate(communities):
            s = counts.conservative_share(c, var)
            if s is not None:
                mat[i, j] = s / 100.0
    for i in range(mat.shape[0]):
        row = mat[i]
        fill = np.nanmean(row) if np.any(~np.isnan(row)) else 0.0
        row[np.isnan(row)] = fill
    return mat


def cluster_variables(counts: VariantCounts, variables: Sequence[str], communities: Sequence[str], k: int, seed: int = 0):
    """k-means over conservative-share vectors, plus a 2-d PCA projection for plotting."""
    from .netstats import kmeans, pca

    mat = share_matrix(counts, variables, communities)
    km = kmeans(mat, k, seed=seed)
    proj = pca(mat, min(2, mat.shape[1], mat.shape[0]))
    return {var: int(lab) for var, lab in zip(variables, km.labels)}, proj


def _timestamp(doc) -> int:
    origin = getattr(doc, "origin", None)
    if origin is None or not hasattr(origin, "created_utc"):
        raise AnnotationError("document carries no timestamp")
    return origin.created_utc


def hourly_variant_profile(corpus: Iterable, spec: VariableSpec, community: str | None = None,
                           utc_offset: int = 0) -> dict[str, np.ndarray]:
    """Per local hour, percentage of conservative and innovative tokens.

    Hours without tokens are NaN (gaps, not zeros). An empty selection gives ``{}``.
    """
    matcher = FormMatcher.from_spec(spec)
    tallies = {role: np.zeros(24, dtype=np.int64) for role in ROLES}
    for comm, doc in _iter_labelled(corpus):
        if community is not None and comm != community:
            continue
        found = matcher.count(doc.tokens, doc.tags)
        if not found:
            continue
        h = local_hour(_timestamp(doc), utc_offset)
        for label, c in found.items():
            tallies[spec.role_of(label)][h] += c
    total = tallies["conservative"] + tallies["innovative"]
    if total.sum() == 0:
        return {}
    with np.errstate(invalid="ignore", divide="ignore"):
        out = {role: np.where(total > 0, 100.0 * tallies[role] / total, np.nan) for role in ROLES}
    out["n"] = total
    return out


def month_key(ts: int) -> str:
    return _dt.datetime.fromtimestamp(ts, _dt.timezone.utc).strftime("%Y-%m")


def _month_range(first: str, last: str) -> list[str]:
    y, m = map(int, first.split("-"))
    ly, lm = map(int, last.split("-"))
    out = []
    while (y, m) <= (ly, lm):
        out.append(f"{y:04d}-{m:02d}")
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return out


def emergence_series(patterns: Mapping[str, Sequence[str]], corpus: Iterable) -> tuple[list[str], dict[str, np.ndarray]]:
    """Monthly counts per orthographic variant.

    ``patterns`` maps a variant label to its surface forms. The month axis
    spans every document in the corpus, so months before a term appears are
    zeros rather than missing.
    """
    forms = {}
    for label, surface in patterns.items():
        for form in surface:
            forms.setdefault(tuple(form.split()), (label, None))
    matcher = FormMatcher(forms)
    monthly: dict[str, Counter] = defaultdict(Counter)
    seen_months = set()
    for doc in corpus:
        doc = doc[1] if isinstance(doc, tuple) else doc
        month = month_key(_timestamp(doc))
        seen_months.add(month)
        monthly[month].update(matcher.count(doc.tokens))
    if not seen_months:
        return [], {label: np.zeros(0, dtype=np.int64) for label in patterns}
    months = _month_range(min(seen_months), max(seen_months))
    series = {label: np.array([monthly[m][label] for m in months], dtype=np.int64) for label in patterns}
    return months, series
