import itertools
import random

import pytest
from hypothesis import given, strategies as st

from dialign.errors import ValidationError
from dialign.textprep import (
    Gazetteer, PhraseModel, TokenizedDoc, apply_phrases, chunk, default_gazetteers, default_tagger,
    expand_macron_variants, learn_phrase_stages, learn_phrases, light_lemma, mask_entities, normalize, pos_tag,
    tokenize,
)
from dialign.textprep.phrases import phrase_score

from conftest import FIXTURES, brute_force_merges

words = st.text(alphabet="abcdeāō", min_size=1, max_size=4)


def doc(tokens):
    return TokenizedDoc(tuple(tokens))


class TestNormalize:
    def test_handles_and_urls(self):
        assert normalize("Kia ora u/someone see r/chch https://x.y") == "kia ora see"

    def test_macron_kept(self):
        assert normalize("Ōtautahi") == "ōtautahi"

    def test_empty(self):
        assert normalize("") == ""

    def test_non_latin_removed(self):
        assert normalize("hello 你好 world") == "hello world"

    def test_diacritics_kept(self):
        assert normalize("Café Māori") == "café māori"


class TestTokenize:
    def test_examples(self):
        assert tokenize("sweet as bro").tokens == ("sweet", "as", "bro")
        assert tokenize("fish n chips!").tokens == ("fish", "n", "chips")

    def test_stopwords(self):
        assert tokenize("the dog and the cat", remove_stopwords=True).tokens == ("dog", "cat")

    def test_reference_segmentation(self):
        # reference segmentation is the word list the text was assembled from
        rng = random.Random(3)
        vocab = ["kia", "ora", "bro", "chur", "sweet", "as", "ute", "jandals", "can't", "te", "reo", "māori"]
        ref = [rng.choice(vocab) for _ in range(500)]
        seps = [" ", ", ", ". ", "! ", " - ", "? ", " (", ") ", "... "]
        text = "".join(w + rng.choice(seps) for w in ref)
        assert list(tokenize(normalize(text)).tokens) == ref

    def test_light_lemma(self):
        assert light_lemma("utes") == "ute"
        assert light_lemma("tramping") == "tramp"
        assert light_lemma("walked") == "walk"
        assert light_lemma("news") == "news"


class TestMacrons:
    def test_examples(self):
        assert expand_macron_variants("ōtautahi") == {"ōtautahi", "otautahi"}
        assert expand_macron_variants("dunedin") == {"dunedin"}
        assert expand_macron_variants("pāpāmoa") == {"pāpāmoa", "papamoa"}

    @given(words)
    def test_contains_input(self, w):
        assert w in expand_macron_variants(w)

    @given(st.text(alphabet="abcdez ", max_size=10))
    def test_identity_without_macrons(self, w):
        assert expand_macron_variants(w) == {w}


class TestMasking:
    gaz = Gazetteer.from_names(["wellington", "palmerston north", "ōtautahi"])

    def test_single(self):
        assert mask_entities(doc(["i", "live", "in", "wellington"]), [self.gaz]).tokens == ("i", "live", "in", "<gpe>")

    def test_longest_match(self):
        assert mask_entities(doc(["palmerston", "north"]), [self.gaz]).tokens == ("<gpe>",)

    def test_macron_variant_masked(self):
        assert mask_entities(doc(["otautahi", "rocks"]), [self.gaz]).tokens == ("<gpe>", "rocks")

    def test_planted_names_scan(self):
        rng = random.Random(5)
        gaz = default_gazetteers()
        names = sorted(e for e in gaz[0].entries if " " not in e and e.isalpha())[:40]
        filler = [f"filler{i}" for i in range(30)]
        toks = [rng.choice(filler) for _ in range(200)]
        planted = rng.sample(names, 12)
        for name in planted:
            toks.insert(rng.randrange(len(toks) + 1), name)
        masked = mask_entities(doc(toks), gaz).tokens
        assert sum(t == "<gpe>" for t in masked) == 12
        assert not set(planted) & set(masked)

    def test_validation(self):
        with pytest.raises(ValidationError):
            Gazetteer(frozenset({"Wellington"}))
        with pytest.raises(ValidationError):
            Gazetteer(frozenset())

    @given(st.lists(st.sampled_from(["a", "b", "c", "wellington", "palmerston", "north"]), max_size=20))
    def test_non_entries_untouched(self, toks):
        masked = mask_entities(doc(toks), [self.gaz]).tokens
        keep = [t for t in toks if t not in ("wellington", "palmerston", "north")]
        assert [t for t in masked if t not in ("<gpe>", "palmerston", "north")] == keep


class TestPhrases:
    def test_kia_ora_merged(self):
        corpus = [["kia", "ora", "bro"], ["kia", "ora", "mate"], ["sweet", "as"], ["chur", "bro"]] * 5
        model = learn_phrases(corpus, min_count=1, threshold=0.5)
        assert apply_phrases(["kia", "ora", "mate"], model) == ["kia_ora", "mate"]

    def test_below_threshold(self):
        corpus = [["a", "b"], ["a", "c"], ["b", "a"]]
        model = learn_phrases(corpus, min_count=1, threshold=50)
        assert apply_phrases(["a", "b"], model) == ["a", "b"]

    def test_exhaustive_fifty_tokens(self):
        rng = random.Random(11)
        vocab = ["kia", "ora", "te", "reo", "bro", "sweet", "as", "chur"]
        corpus = [[rng.choice(vocab) for _ in range(10)] for _ in range(5)]
        assert sum(map(len, corpus)) == 50
        for min_count, threshold in itertools.product([1, 2], [0.5, 1.0, 2.0]):
            model = learn_phrases(corpus, min_count, threshold)
            assert [apply_phrases(d, model) for d in corpus] == brute_force_merges(corpus, min_count, threshold)

    def test_trigram_stage(self):
        rng = random.Random(2)
        filler = [f"w{i}" for i in range(200)]
        corpus = [[rng.choice(filler) for _ in range(4)] + ["te", "reo", "māori"] + [rng.choice(filler) for _ in range(4)]
                  for _ in range(30)]
        models = learn_phrase_stages(corpus, min_count=1, threshold=3.0)
        assert ("te", "reo") in models[0].phrasegrams()
        out = apply_phrases(apply_phrases(["te", "reo", "māori"], models[0]), models[1])
        assert out == ["te_reo_māori"]

    def test_empty_corpus(self):
        model = learn_phrases([])
        assert model.vocab_size == 0 and model.phrasegrams() == {}

    def test_validation(self):
        with pytest.raises(ValueError):
            PhraseModel(min_count=0)
        with pytest.raises(ValueError):
            PhraseModel(threshold=0)

    def test_save_load(self, tmp_path):
        corpus = [["kia", "ora", "bro"], ["kia", "ora"]] * 3
        model = learn_phrases(corpus, 1, 1.0)
        model.save(tmp_path / "p.txt")
        loaded = PhraseModel.load(tmp_path / "p.txt")
        assert loaded.phrasegrams() == pytest.approx(model.phrasegrams())

    def test_score_formula(self):
        assert phrase_score(4, 5, 3, 10, 1) == (3 - 1) * 10 / 20

    @given(st.lists(st.lists(st.sampled_from("abcd"), max_size=8), max_size=6))
    def test_content_preserved(self, corpus):
        model = learn_phrases(corpus, 1, 0.1)
        for d in corpus:
            merged = apply_phrases(d, model)
            assert " ".join(merged).replace("_", " ").split() == d


class TestTagger:
    def test_closed_class(self):
        tags = default_tagger().tag(["the", "dog", "runs"])
        assert tags[0] == "DET" and tags[1] == "NN" and tags[2].startswith("VB")

    def test_burnt(self):
        tagger = default_tagger()
        assert tagger.tag(["the", "burnt", "toast"])[1] == "JJ"
        assert tagger.tag(["she", "burnt", "it"])[1] == "VBD"

    def test_fixture_agreement(self):
        tokens, gold = [], []
        for line in (FIXTURES / "tagged_100.txt").read_text(encoding="utf-8").splitlines():
            pairs = [p.rsplit("/", 1) for p in line.split()]
            tokens.append([w for w, _ in pairs])
            gold.append([t for _, t in pairs])
        tagger = default_tagger()
        hits = sum(p == g for toks, tags in zip(tokens, gold) for p, g in zip(tagger.tag(toks), tags))
        total = sum(map(len, gold))
        assert total >= 100
        assert hits / total >= 0.9

    def test_pos_tag_doc(self):
        tagged = pos_tag(tokenize("the dog runs"))
        assert len(tagged.tags) == 3

    def test_unknown_word_fallback(self):
        assert default_tagger().tag(["the", "zorblification"])[1] in ("NN", "NNS")

    def test_save_load(self, tmp_path):
        from dialign.textprep import PerceptronTagger
        tagger = default_tagger()
        tagger.save(tmp_path / "t.weights")
        again = PerceptronTagger.load(tmp_path / "t.weights")
        sent = "my mate bought a new ute yesterday".split()
        assert again.tag(sent) == tagger.tag(sent)


class TestChunk:
    def test_sizes(self):
        assert len(chunk(doc(["w"] * 499))) == 1
        assert [len(c.tokens) for c in chunk(doc(["w"] * 1001))] == [500, 500, 1]

    @given(st.lists(words, max_size=60), st.integers(1, 20))
    def test_partition(self, toks, n):
        pieces = chunk(doc(toks), n)
        assert [t for p in pieces for t in p.tokens] == toks
        assert all(len(p.tokens) == n for p in pieces[:-1])

    def test_bad_size(self):
        with pytest.raises(ValueError):
            chunk(doc(["a"]), 0)
