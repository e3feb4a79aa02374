"""Seeded synthetic corpora with planted structure, used as test oracles and CLI fixtures."""

from __future__ import annotations

import json
import random
from typing import Sequence

import numpy as np

from .corpus import TextUnit

BASE_TS = 1_262_304_000  # 2010-01-01T00:00:00Z
DAY = 86_400


def topic_words(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def two_topic_corpus(n_tokens: int = 100_000, vocab_per_topic: int = 100, sentence_len: int = 10,
                     seed: int = 0) -> tuple[list[list[str]], list[str], list[str]]:
    """Sentences drawn uniformly from one of two disjoint topic vocabularies."""
    rng = random.Random(seed)
    a, b = topic_words("alpha", vocab_per_topic), topic_words("beta", vocab_per_topic)
    out, n = [], 0
    while n < n_tokens:
        words = a if rng.random() < 0.5 else b
        out.append([rng.choice(words) for _ in range(sentence_len)])
        n += sentence_len
    return out, a, b


def topic_margin(model, group_a: Sequence[str], group_b: Sequence[str]) -> float:
    """Mean within-group cosine (off-diagonal) minus mean cross-group cosine."""
    unit = model.unit_vectors()
    ia = [model.index[w] for w in group_a if w in model]
    ib = [model.index[w] for w in group_b if w in model]

    def within(ix):
        s = unit[ix] @ unit[ix].T
        return (s.sum() - np.trace(s)) / (s.size - len(ix))

    cross = float((unit[ia] @ unit[ib].T).mean())
    return float((within(ia) + within(ib)) / 2 - cross)


DRIFT_MIX = (1.0, 0.75, 0.5, 0.25, 0.0)


def drift_corpus(mix: Sequence[float] = DRIFT_MIX, sentences_per_period: int = 2000, source_rate: float = 1.0,
                 vocab_per_topic: int = 40, sentence_len: int = 10, seed: int = 0,
                 source: str = "source", target_a: str = "targeta", target_b: str = "targetb") -> list[TextUnit]:
    """Periods in which ``source`` is used in topic A contexts with probability
    ``mix[p]`` and in topic B contexts otherwise.

    Each sentence draws its words uniformly from one topic vocabulary, which
    includes that topic's target word. A ``source_rate`` share of sentences
    carries the source word in place of one topic word. A constant ``mix``
    gives the stationary null corpus. Timestamps advance one hour per sentence.
    """
    rng = random.Random(seed)
    topics = {"a": topic_words("ctxa", vocab_per_topic - 1) + [target_a],
              "b": topic_words("ctxb", vocab_per_topic - 1) + [target_b]}
    units, ts = [], BASE_TS
    for p, q in enumerate(mix):
        for i in range(sentences_per_period):
            with_source = rng.random() < source_rate
            if with_source:
                topic = "a" if rng.random() < q else "b"
            else:
                topic = "a" if rng.random() < 0.5 else "b"
            words = [rng.choice(topics[topic]) for _ in range(sentence_len)]
            if with_source:
                words[rng.randrange(sentence_len)] = source
            units.append(TextUnit(f"d{p}_{i}", "synth", "rcomm", " ".join(words), ts, f"user{rng.randrange(200)}"))
            ts += 3600
    return units


def masking_corpus(place_names: Sequence[Sequence[str]], docs_per_class: int = 150, doc_len: int = 30,
                   names_per_doc: int = 2, filler_vocab: int = 300, seed: int = 0) -> list[tuple[list[str], str]]:
    """Classes that differ only by which place names they mention.

    ``place_names[c]`` lists the names planted in class ``c``; all other
    tokens come from one shared filler distribution.
    """
    rng = random.Random(seed)
    filler = topic_words("word", filler_vocab)
    out = []
    for c, names in enumerate(place_names):
        for _ in range(docs_per_class):
            toks = [rng.choice(filler) for _ in range(doc_len)]
            for _ in range(names_per_doc):
                toks.insert(rng.randrange(len(toks) + 1), rng.choice(names))
            out.append((" ".join(toks), f"class{c}"))
    return out


def block_memberships(n_blocks: int = 3, communities_per_block: int = 4, users_per_block: int = 200,
                      users_per_community: int = 60, cross_rate: float = 0.0, seed: int = 0) -> dict[str, set[str]]:
    """Community -> user set; communities in one block draw users from a shared pool."""
    rng = random.Random(seed)
    pools = [[f"u{b}_{i}" for i in range(users_per_block)] for b in range(n_blocks)]
    out = {}
    for b in range(n_blocks):
        for j in range(communities_per_block):
            users = set(rng.sample(pools[b], users_per_community))
            for _ in range(int(cross_rate * users_per_community)):
                other = rng.choice([x for x in range(n_blocks) if x != b])
                users.add(rng.choice(pools[other]))
            out[f"c{b}_{j}"] = users
    return out


FIXTURE_COMMUNITIES = ("newzealand", "australia", "unitedkingdom", "canada")
# per community: conservative share for a few bundled variables
FIXTURE_PREFERENCES = {
    "newzealand": {"TRAMP3": 0.7, "UTE": 0.95, "TOILET": 0.9, "TELLY": 0.1, "LAWN": 0.8},
    "australia": {"TRAMP3": 0.1, "UTE": 0.9, "TOILET": 0.8, "TELLY": 0.1, "LAWN": 0.3},
    "unitedkingdom": {"TRAMP3": 0.05, "UTE": 0.2, "TOILET": 0.85, "TELLY": 0.3, "LAWN": 0.3},
    "canada": {"TRAMP3": 0.02, "UTE": 0.05, "TOILET": 0.6, "TELLY": 0.05, "LAWN": 0.2},
}
FIXTURE_VARIANTS = {
    "TRAMP3": ("tramping", "hiking"), "UTE": ("ute", "pickup truck"), "TOILET": ("toilet", "potty"),
    "TELLY": ("telly", "tv"), "LAWN": ("lawn", "yard"),
}
FILLER = ("the", "a", "we", "went", "to", "with", "my", "mate", "on", "weekend", "was", "good", "great",
          "really", "and", "then", "after", "work", "home", "old", "new", "it", "is", "some", "people")
PLACES = {
    "newzealand": ("wellington", "auckland", "dunedin"), "australia": ("sydney", "melbourne", "perth"),
    "unitedkingdom": ("london", "leeds", "bristol"), "canada": ("toronto", "vancouver", "calgary"),
}


def _sentence(rng: random.Random, community: str) -> str:
    words = [rng.choice(FILLER) for _ in range(rng.randint(6, 14))]
    var = rng.choice(sorted(FIXTURE_VARIANTS))
    cons, inno = FIXTURE_VARIANTS[var]
    words.insert(rng.randrange(len(words) + 1), cons if rng.random() < FIXTURE_PREFERENCES[community][var] else inno)
    if rng.random() < 0.3:
        words.insert(rng.randrange(len(words) + 1), rng.choice(PLACES[community]))
    return " ".join(words)


def fixture_records(n_records: int = 400, seed: int = 0, deleted_rate: float = 0.05, duplicate_rate: float = 0.04,
                    malformed: int = 2) -> list[str]:
    """Lines of an archive-style dump (JSON per line) across four communities.

    Includes deleted and removed records, duplicate ids, moderator-marked and
    bot authors, and a few malformed lines.
    """
    rng = random.Random(seed)
    lines, emitted = [], []
    span = 6 * 365 * DAY
    for i in range(n_records):
        community = FIXTURE_COMMUNITIES[i % len(FIXTURE_COMMUNITIES)]
        ts = BASE_TS + rng.randrange(span)
        author = f"user{rng.randrange(60)}"
        if rng.random() < 0.03:
            author = "helpful_bot"
        kind = rng.random()
        score = rng.randint(-3, 40)
        if kind < 0.6:
            obj = {"id": f"c{i}", "author": author, "subreddit": community, "created_utc": ts,
                   "body": _sentence(rng, community), "score": score}
        elif kind < 0.8:
            obj = {"id": f"s{i}", "author": author, "subreddit": community, "created_utc": ts,
                   "title": _sentence(rng, community), "selftext": _sentence(rng, community), "score": score,
                   "url": f"https://www.reddit.com/r/{community}/s{i}"}
        else:
            obj = {"id": f"s{i}", "author": author, "subreddit": community, "created_utc": ts,
                   "title": _sentence(rng, community), "selftext": "", "score": score,
                   "url": f"https://example.org/{i}"}
        if rng.random() < 0.05:
            obj["distinguished"] = "moderator"
        r = rng.random()
        if r < deleted_rate / 2:
            obj["author"] = "[deleted]"
        elif r < deleted_rate:
            if "body" in obj:
                obj["body"] = "[removed]"
            else:
                obj["selftext"] = "[removed]"
        lines.append(json.dumps(obj, sort_keys=True))
        emitted.append(obj)
        if rng.random() < duplicate_rate:
            lines.append(json.dumps(obj, sort_keys=True))
    for j in range(malformed):
        lines.insert(rng.randrange(len(lines)), '{"id": "broken' + str(j) + '", "author": ')
    return lines


def write_fixture(path, **kwargs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in fixture_records(**kwargs):
            fh.write(line + "\n")
