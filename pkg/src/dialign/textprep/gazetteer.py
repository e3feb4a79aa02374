"""Gazetteer loading and place-name masking."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from ..errors import ValidationError
from .text import TOKEN_RE, TokenizedDoc

MACRONS = str.maketrans("āēīōūĀĒĪŌŪ", "aeiouAEIOU")
PLACEHOLDERS = {"GPE": "<gpe>", "LOC": "<loc>"}


def expand_macron_variants(name: str) -> set[str]:
    """The name itself plus its spelling with every macron dropped."""
    return {name, name.translate(MACRONS)}


@dataclass(frozen=True)
class Gazetteer:
    entries: frozenset[str]
    label: str = "GPE"

    def __post_init__(self):
        if self.label not in PLACEHOLDERS:
            raise ValidationError(f"unknown gazetteer label {self.label!r}")
        if not self.entries:
            raise ValidationError("gazetteer has no entries")
        bad = [e for e in self.entries if e != e.lower()]
        if bad:
            raise ValidationError(f"gazetteer entries must be lowercase: {bad[:3]}")

    @classmethod
    def from_names(cls, names: Iterable[str], label: str = "GPE", macron_variants: bool = True) -> "Gazetteer":
        entries = set()
        for name in names:
            if name.strip().startswith("#"):
                continue
            # same segmentation as the tokenizer, so hyphenated names match
            name = " ".join(TOKEN_RE.findall(unicodedata.normalize("NFC", name.lower())))
            if not name:
                continue
            entries |= expand_macron_variants(name) if macron_variants else {name}
        return cls(frozenset(entries), label)

    @property
    def placeholder(self) -> str:
        return PLACEHOLDERS[self.label]


def load_gazetteer(path, label: str = "GPE", macron_variants: bool = True) -> Gazetteer:
    """Read a UTF-8 file with one lowercase name per line."""
    with open(path, encoding="utf-8") as fh:
        return Gazetteer.from_names(fh, label, macron_variants)


def default_gazetteers() -> list[Gazetteer]:
    """The bundled New Zealand place names (GPE) and generic locations (LOC)."""
    data = resources.files("dialign") / "data"
    gpe = Gazetteer.from_names((data / "gazetteer_nz_gpe.txt").read_text(encoding="utf-8").splitlines(), "GPE")
    loc = Gazetteer.from_names((data / "gazetteer_loc.txt").read_text(encoding="utf-8").splitlines(), "LOC")
    return [gpe, loc]


def _build_index(gazetteers: Sequence[Gazetteer]) -> tuple[dict[tuple[str, ...], str], int]:
    index: dict[tuple[str, ...], str] = {}
    longest = 0
    for gaz in gazetteers:
        for entry in gaz.entries:
            key = tuple(entry.split())
            # earlier gazetteers win on overlap
            index.setdefault(key, gaz.placeholder)
            longest = max(longest, len(key))
    return index, longest


def mask_tokens(tokens: Sequence[str], gazetteers: Sequence[Gazetteer]) -> list[str]:
    index, longest = _build_index(gazetteers)
    return _mask(tokens, index, longest)


def _mask(tokens, index, longest):
    out = []
    i = 0
    n = len(tokens)
    while i < n:
        for size in range(min(longest, n - i), 0, -1):
            placeholder = index.get(tuple(tokens[i:i + size]))
            if placeholder is not None:
                out.append(placeholder)
                i += size
                break
        else:
            out.append(tokens[i])
            i += 1
    return out


class EntityMasker:
    """Reusable longest-match-first masker over a fixed set of gazetteers."""

    def __init__(self, gazetteers: Sequence[Gazetteer]):
        self.index, self.longest = _build_index(gazetteers)

    def __call__(self, doc: TokenizedDoc) -> TokenizedDoc:
        return doc.with_tokens(_mask(doc.tokens, self.index, self.longest))


def mask_entities(doc: TokenizedDoc, gazetteers: Sequence[Gazetteer]) -> TokenizedDoc:
    """Replace gazetteer n-grams with ``<gpe>``/``<loc>``, longest match first.

    Tags are dropped because masking changes token count.
    """
    return EntityMasker(gazetteers)(doc)
