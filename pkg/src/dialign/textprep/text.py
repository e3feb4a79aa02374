"""Normalisation, tokenisation and chunking."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Any, Sequence

URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
HANDLE_RE = re.compile(r"(?<!\S)/?[ur]/\S*", re.IGNORECASE)
TOKEN_RE = re.compile(r"<[a-z]+>|[^\W_]+(?:['’][^\W_]+)*(?:_[^\W_]+)*")

STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been before being below
between both but by can could did do does doing down during each few for from further had has have
having he her here hers herself him himself his how i if in into is it its itself just me more most
my myself no nor not now of off on once only or other our ours ourselves out over own same she
should so some such than that the their theirs them themselves then there these they this those
through to too under until up very was we were what when where which while who whom why will with
would you your yours yourself yourselves
""".split())

# -ed/-ing/-s stripping would mangle these
LEMMA_EXCEPTIONS = {
    "was": "be", "were": "be", "is": "be", "are": "be", "has": "have", "does": "do", "goes": "go",
    "news": "news", "bus": "bus", "gas": "gas", "this": "this", "his": "his", "its": "its",
    "us": "us", "yes": "yes", "less": "less", "kiwis": "kiwi", "series": "series", "species": "species",
    "thing": "thing", "something": "something", "nothing": "nothing", "anything": "anything",
    "everything": "everything", "morning": "morning", "evening": "evening", "king": "king",
    "ring": "ring", "spring": "spring", "string": "string", "bring": "bring", "sing": "sing",
    "wing": "wing", "swing": "swing", "sting": "sting", "ceiling": "ceiling", "red": "red",
    "bed": "bed", "need": "need", "feed": "feed", "seed": "seed", "speed": "speed", "shed": "shed",
    "hundred": "hundred", "bred": "bred", "fled": "fled", "led": "led", "wed": "wed", "weed": "weed",
    "tramping": "tramp", "hiking": "hike",
}


@dataclass(frozen=True)
class TokenizedDoc:
    tokens: tuple[str, ...]
    tags: tuple[str, ...] | None = None
    origin: Any = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.tags is not None:
            if not isinstance(self.tags, tuple):
                object.__setattr__(self, "tags", tuple(self.tags))
            if len(self.tags) != len(self.tokens):
                raise ValueError("tags must be parallel to tokens")

    def __len__(self):
        return len(self.tokens)

    def with_tokens(self, tokens: Sequence[str], tags: Sequence[str] | None = None) -> "TokenizedDoc":
        return TokenizedDoc(tuple(tokens), None if tags is None else tuple(tags), self.origin)


def _is_latin_char(ch: str) -> bool:
    if ord(ch) < 128:
        return True
    cat = unicodedata.category(ch)
    if cat == "Mn":
        return True  # combining diacritic
    if cat.startswith("L"):
        return "LATIN" in unicodedata.name(ch, "")
    if cat.startswith("Z"):
        return True
    # keep typographic punctuation such as curly quotes
    return cat.startswith("P")


def normalize(text: str) -> str:
    """Strip urls, user/community handles and non-Latin script; lowercase.

    Latin letters with diacritics (macrons included) are kept.
    """
    text = unicodedata.normalize("NFC", text)
    text = URL_RE.sub(" ", text)
    text = HANDLE_RE.sub(" ", text)
    text = "".join(ch if _is_latin_char(ch) else " " for ch in text)
    return " ".join(text.lower().split())


def light_lemma(token: str) -> str:
    """Suffix-stripping stand-in for lemmatisation."""
    if token in LEMMA_EXCEPTIONS:
        return LEMMA_EXCEPTIONS[token]
    if len(token) <= 3 or not token.isalpha():
        return token
    if token.endswith("ies") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith(("sses", "shes", "ches", "xes", "zes")):
        return token[:-2]
    if token.endswith("ing") and len(token) > 5:
        stem = token[:-3]
        if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
            stem = stem[:-1]
        return stem
    if token.endswith("ed") and len(token) > 4:
        stem = token[:-2]
        if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
            stem = stem[:-1]
        return stem
    if token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    return token


def tokenize(text: str, remove_stopwords: bool = False, lemmatize: bool = False, origin=None) -> TokenizedDoc:
    """Split on whitespace and punctuation; punctuation never becomes a token."""
    tokens = TOKEN_RE.findall(text)
    if remove_stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    if lemmatize:
        tokens = [light_lemma(t) for t in tokens]
    return TokenizedDoc(tuple(tokens), None, origin)


def remove_stopwords(doc: TokenizedDoc) -> TokenizedDoc:
    keep = [i for i, t in enumerate(doc.tokens) if t not in STOPWORDS]
    tags = None if doc.tags is None else [doc.tags[i] for i in keep]
    return doc.with_tokens([doc.tokens[i] for i in keep], tags)


def chunk(doc: TokenizedDoc, max_words: int = 500) -> list[TokenizedDoc]:
    """Consecutive non-overlapping pieces of at most ``max_words`` tokens."""
    if max_words < 1:
        raise ValueError("max_words must be >= 1")
    if not doc.tokens:
        return [doc]
    out = []
    for start in range(0, len(doc.tokens), max_words):
        stop = start + max_words
        tags = None if doc.tags is None else doc.tags[start:stop]
        out.append(doc.with_tokens(doc.tokens[start:stop], tags))
    return out


def prepare(unit, remove_stops: bool = False) -> TokenizedDoc:
    """Normalise and tokenise a :class:`~dialign.corpus.TextUnit`."""
    return tokenize(normalize(unit.text), remove_stopwords=remove_stops, origin=unit)
