import itertools
import math
import random
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dialign import cxg
from dialign.corpus import TextUnit
from dialign.cxg import AnnotatedDoc, Construction, Constructicon, MinerConfig, SlotConstraint
from dialign.embed import EmbeddingModel, TrainConfig, train
from dialign.errors import AnnotationError, FormatError, ValidationError
from dialign.synth import two_topic_corpus
from dialign.textprep import default_tagger

from conftest import brute_force_match, random_annotated, random_construction


def lex_doc(text, origin=None):
    return AnnotatedDoc(tuple(text.split()), origin=origin)


def unit(community, ts, author="u"):
    return TextUnit(f"r{ts}", community, "rcomm", "x", ts, author)


class TestConstructions:
    def test_parse(self):
        c = Construction.parse("c1", "lex:of;syn:DET;sem:17")
        assert c.pattern == "lex:of;syn:DET;sem:17" and c.feature_set == cxg.SEM_PLUS

    def test_feature_sets(self):
        assert Construction.parse("a", "lex:of;lex:the").feature_set == cxg.LEX_ONLY
        assert Construction.parse("b", "lex:of;syn:DET").feature_set == cxg.SYN_ONLY

    def test_invalid(self):
        with pytest.raises(ValidationError):
            Construction.parse("a", "lex:of")
        with pytest.raises(ValidationError):
            Construction.parse("a", "lex:a;lex:b;lex:c;lex:d;lex:e")
        with pytest.raises(FormatError):
            SlotConstraint.parse("of")
        with pytest.raises(ValidationError):
            SlotConstraint.parse("sem:abc")

    def test_file_roundtrip(self, tmp_path):
        cc = Constructicon((Construction.parse("c1", "lex:of;lex:the"), Construction.parse("c2", "syn:V;syn:ADP")))
        cc.save(tmp_path / "c.tsv")
        assert (tmp_path / "c.tsv").read_text() == "c1\tlex:of;lex:the\nc2\tsyn:V;syn:ADP\n"
        assert Constructicon.load(tmp_path / "c.tsv") == cc

    def test_duplicate_ids(self):
        c = Construction.parse("c1", "lex:a;lex:b")
        with pytest.raises(ValidationError):
            Constructicon((c, c))


class TestMatch:
    def test_overlapping(self):
        assert cxg.match(lex_doc("of the of the"), Construction.parse("c", "lex:of;lex:the")) == 2
        assert cxg.match(lex_doc("a a a"), Construction.parse("c", "lex:a;lex:a")) == 2

    def test_breaks_down(self):
        toks = ["it", "breaks", "down"]
        doc = AnnotatedDoc(tuple(toks), tuple(default_tagger().tag(toks)))
        assert cxg.match(doc, Construction.parse("c", "syn:V;syn:ADP")) == 1

    def test_missing_layer(self):
        with pytest.raises(AnnotationError):
            cxg.match(lex_doc("it breaks down"), Construction.parse("c", "syn:V;syn:ADP"))

    def test_brute_force(self):
        rng = random.Random(0)
        doc = random_annotated(200, seed=1)
        for i in range(40):
            c = random_construction(rng, f"c{i}")
            assert cxg.match(doc, c) == brute_force_match(doc, c)

    @given(st.integers(0, 10_000), st.lists(st.sampled_from(["x", "y", "of", "the"]), max_size=10))
    @settings(max_examples=50)
    def test_translation_invariant(self, seed, prefix):
        doc = random_annotated(40, seed)
        c = random_construction(random.Random(seed), "c")
        n = len(prefix)
        longer = AnnotatedDoc(tuple(prefix) + doc.tokens, ("OTHER",) * n + doc.tags, (99,) * n + doc.sem)
        assert cxg.match(longer, c) >= cxg.match(doc, c)


class TestParse:
    cc = Constructicon((Construction.parse("c1", "lex:kia;lex:ora"), Construction.parse("c2", "lex:of;lex:the")))

    def test_groups_and_rates(self, tmp_path):
        docs = [lex_doc("kia ora bro", unit("nz", 1_300_000_000)), lex_doc("of the best", unit("au", 1_300_000_000)),
                lex_doc("kia ora kia ora", unit("nz", 1_300_000_100))]
        cv = cxg.parse_counts(docs, self.cc, groups=["nz|2011-03", "au|2011-03", "uk|2011-03"])
        assert cv.vector("nz|2011-03").tolist() == [3, 0]
        assert cv.vector("au|2011-03").tolist() == [0, 1]
        assert cv.vector("uk|2011-03").tolist() == [0, 0]
        assert cv.rates()[0, 0] == pytest.approx(3 * 1000 / 7)
        cv.write_csv(tmp_path / "r.csv", normalized=True)
        assert (tmp_path / "r.csv").read_text().splitlines()[0] == "group,tokens,c1,c2"

    def test_user_grouping(self):
        docs = [lex_doc("kia ora", unit("nz", 1, author="ana")), lex_doc("kia ora", unit("au", 2, author="ben"))]
        cv = cxg.parse_counts(docs, self.cc, group_by="user")
        assert cv.groups == ["ana", "ben"]

    @given(st.lists(st.tuples(st.sampled_from(["a", "b"]),
                              st.lists(st.sampled_from(["kia", "ora", "of", "the"]), max_size=8)), max_size=8))
    def test_additive(self, items):
        docs = [lex_doc(" ".join(t), unit("nz", 1, author=g)) for g, t in items]
        pooled = cxg.parse_counts(docs, self.cc, group_by=lambda d: "all")
        split = cxg.parse_counts(docs, self.cc, group_by="user")
        total = split.counts.sum(axis=0) if len(split.groups) else np.zeros(2)
        assert np.array_equal(pooled.counts.sum(axis=0) if len(pooled.groups) else np.zeros(2), total)


@pytest.fixture(scope="module")
def topical():
    corpus, a, b = two_topic_corpus(30_000, vocab_per_topic=30, seed=2)
    return train(corpus, TrainConfig(dim=20, window=3, min_count=1, epochs=3, sample=0.0, seed=0)), a, b


class TestSemClusters:
    def test_topics_recovered(self, topical):
        model, a, b = topical
        labels = cxg.induce_sem_clusters(model, 2, seed=0)
        assert len({labels[w] for w in a}) == 1 and len({labels[w] for w in b}) == 1
        assert labels[a[0]] != labels[b[0]]

    def test_single_and_deterministic(self, topical):
        model = topical[0]
        assert set(cxg.induce_sem_clusters(model, 1).values()) == {0}
        assert cxg.induce_sem_clusters(model, 5, seed=3) == cxg.induce_sem_clusters(model, 5, seed=3)

    def test_k_too_large(self, topical):
        with pytest.raises(ValidationError):
            cxg.induce_sem_clusters(topical[0], 10_000)


class TestNetwork:
    def test_identical_complete(self):
        g = cxg.similarity_network({"a": [1, 2], "b": [2, 4], "c": [3, 6]}, 0.99)
        assert len(g.edges) == 3

    def test_orthogonal_empty(self):
        assert not cxg.similarity_network({"a": [1, 0], "b": [0, 1]}, 0.99).edges

    def test_two_blocks(self):
        rng = np.random.default_rng(0)
        base = rng.random((2, 30))
        vecs = {f"b{b}_{i}": base[b] + rng.normal(0, 0.01, 30) for b in range(2) for i in range(5)}
        comps = cxg.similarity_network(vecs, 0.99).components()
        assert sorted(sorted(c) for c in comps) == [[f"b0_{i}" for i in range(5)], [f"b1_{i}" for i in range(5)]]

    @given(st.lists(st.lists(st.floats(0, 1), min_size=3, max_size=3), min_size=2, max_size=6),
           st.floats(-1, 1), st.floats(0, 1))
    def test_threshold_subset(self, rows, t1, gap):
        vecs = {f"g{i}": r for i, r in enumerate(rows)}
        t2 = min(1.0, t1 + gap)
        assert set(cxg.similarity_network(vecs, t2).edges) <= set(cxg.similarity_network(vecs, t1).edges)


def oracle_mine(docs, config):
    """Exhaustive scoring of every candidate, round by round, from window enumeration."""
    def options(doc, i):
        out = [SlotConstraint("lex", doc.tokens[i])]
        if doc.tags is not None and "syn" in config.kinds:
            out.append(SlotConstraint("syn", doc.tags[i]))
        if doc.sem is not None and "sem" in config.kinds:
            out.append(SlotConstraint("sem", str(doc.sem[i])))
        return [o for o in out if o.kind in config.kinds]

    def holds(seq, doc, start):
        return all(s.matches(doc.tokens[start + j], doc.tags[start + j] if doc.tags else None,
                             doc.sem[start + j] if doc.sem else None) for j, s in enumerate(seq))

    kept, frontier = {}, None
    for rnd in range(1, config.rounds + 1):
        length = rnd + 1
        if length > 4 or frontier == set():
            break
        wins = [(d, i) for d, doc in enumerate(docs) for i in range(len(doc.tokens) - length + 1)]
        cands = set()
        for d, i in wins:
            for seq in itertools.product(*(options(docs[d], i + j) for j in range(length))):
                if frontier is None or seq[:-1] in frontier:
                    cands.add(seq)
        scores = {}
        for seq in cands:
            cover = [(d, i) for d, i in wins if holds(seq, docs[d], i)]
            pre = sum(holds(seq[:-1], docs[d], i) for d, i in wins)
            last = sum(holds(seq[-1:], docs[d], i + length - 1) for d, i in wins)
            joint = len(cover)
            rest = len(wins) - pre
            dp = joint / pre - ((last - joint) / rest if rest else 0.0)
            if joint >= config.min_freq and dp >= config.association_threshold:
                scores[seq] = (dp, tuple(cover))
        for seq, (dp, cover) in scores.items():
            if not any(c == cover and d > dp for d, c in scores.values()):
                kept[seq] = dp
        frontier = set(scores)
    return kept


class TestMiner:
    def test_kia_ora(self):
        docs = [lex_doc("kia ora bro"), lex_doc("kia ora whanau"), lex_doc("sweet as bro")] * 4
        mined = cxg.mine_constructions(docs, MinerConfig(min_freq=3))
        assert "lex:kia;lex:ora" in mined.patterns()
        assert mined.provenance == "mined"

    def test_infinite_threshold(self):
        docs = [lex_doc("kia ora bro")] * 10
        assert len(cxg.mine_constructions(docs, MinerConfig(association_threshold=math.inf))) == 0

    def test_empty_corpus(self):
        assert len(cxg.mine_constructions([])) == 0

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_oracle(self, seed):
        docs = [random_annotated(12, seed * 10 + i) for i in range(4)]
        config = MinerConfig(rounds=3, min_freq=2, association_threshold=0.3)
        mined = cxg.mine_constructions(docs, config)
        expected = oracle_mine(docs, config)
        got = {c.slots: mined.scores[c.id] for c in mined}
        assert len(expected) >= 5
        assert set(got) == set(expected)
        for seq in got:
            assert got[seq] == pytest.approx(expected[seq], abs=1e-12)

    def test_planted_patterns(self):
        rng = random.Random(4)
        filler = [f"w{i}" for i in range(50)]
        docs = []
        for _ in range(30):
            toks = [rng.choice(filler) for _ in range(6)] + ["nek", "minnit"] + [rng.choice(filler) for _ in range(6)]
            docs.append(lex_doc(" ".join(toks)))
        mined = cxg.mine_constructions(docs, MinerConfig(min_freq=5, association_threshold=0.9))
        assert "lex:nek;lex:minnit" in mined.patterns()
