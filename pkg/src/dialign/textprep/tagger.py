"""Averaged perceptron part-of-speech tagger over a coarse tagset.

The tagger follows the greedy left-to-right design popularised by the
TextBlob/NLTK perceptron tagger: a tag dictionary for unambiguous closed-class
words, then a linear model over word, affix and previous-tag features. The
bundled weights are trained on a template-generated seed corpus (see
:mod:`dialign.textprep.seedcorpus`); unknown words fall back on suffix
features, and on explicit suffix rules when the model is silent.
"""

from __future__ import annotations

import random
from collections import defaultdict
from importlib import resources
from typing import Iterable, Sequence

from .text import TokenizedDoc

TAGSET = ("NN", "NNS", "VB", "VBD", "VBN", "VBG", "JJ", "RB", "IN", "DET", "PRP", "MOD", "OTHER")

START = ("-START-", "-START2-")
END = ("-END-", "-END2-")

CLOSED_CLASS = {
    "DET": "the a an this these those every some any my your our their its no each another".split(),
    "PRP": "i you he she it we they me him us them myself yourself himself herself itself ourselves themselves "
           "mine yours ours theirs someone everyone something nothing anyone everything".split(),
    "MOD": "can could will would shall should may might must cannot can't won't couldn't wouldn't shouldn't "
           "mustn't ca wo".split(),
    "IN": "of in on at by for with from to into about over under through against after before during "
          "without between since until down up out off across around near onto upon within".split(),
    "OTHER": "and or but so if because not n't nor yeah yes eh lol oh ok okay please".split(),
}
AUXILIARIES = {
    "is": "VB", "are": "VB", "am": "VB", "be": "VB", "was": "VBD", "were": "VBD", "been": "VBN",
    "being": "VBG", "has": "VB", "have": "VB", "do": "VB", "does": "VB", "did": "VBD",
}


def closed_class_lexicon() -> dict[str, str]:
    lex = {w: tag for tag, words in CLOSED_CLASS.items() for w in words}
    lex.update(AUXILIARIES)
    return lex


def suffix_fallback(word: str) -> str:
    """Rule-based guess for words the model cannot score."""
    if not word or not any(c.isalpha() for c in word):
        return "OTHER"
    if word.endswith("ing") and len(word) > 4:
        return "VBG"
    if word.endswith("ed") and len(word) > 3:
        return "VBD"
    if word.endswith("ly") and len(word) > 3:
        return "RB"
    if word.endswith(("ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish")):
        return "JJ"
    if word.endswith("s") and not word.endswith("ss") and len(word) > 3:
        return "NNS"
    return "NN"


class AveragedPerceptron:
    def __init__(self):
        self.weights: dict[str, dict[str, float]] = {}
        self.classes: set[str] = set()
        self._totals: dict[tuple[str, str], float] = defaultdict(float)
        self._tstamps: dict[tuple[str, str], int] = defaultdict(int)
        self.i = 0

    def predict(self, features: dict[str, int]) -> str | None:
        scores: dict[str, float] = defaultdict(float)
        for feat, value in features.items():
            if feat not in self.weights or value == 0:
                continue
            for label, weight in self.weights[feat].items():
                scores[label] += value * weight
        if not scores:
            return None
        # ties resolved by label name for determinism
        return max(sorted(self.classes), key=lambda label: scores.get(label, 0.0))

    def update(self, truth: str, guess: str | None, features: Iterable[str]) -> None:
        def upd(c, f, w, v):
            param = (f, c)
            self._totals[param] += (self.i - self._tstamps[param]) * w
            self._tstamps[param] = self.i
            self.weights[f][c] = w + v

        self.i += 1
        if truth == guess:
            return
        for f in features:
            weights = self.weights.setdefault(f, {})
            upd(truth, f, weights.get(truth, 0.0), 1.0)
            if guess is not None:
                upd(guess, f, weights.get(guess, 0.0), -1.0)

    def average_weights(self) -> None:
        for feat, weights in self.weights.items():
            new = {}
            for clas, weight in weights.items():
                param = (feat, clas)
                total = self._totals[param] + (self.i - self._tstamps[param]) * weight
                averaged = round(total / self.i, 3)
                if averaged:
                    new[clas] = averaged
            self.weights[feat] = new


def _normalize(word: str) -> str:
    if word.isdigit() and len(word) == 4:
        return "!YEAR"
    if word and word[0].isdigit():
        return "!DIGITS"
    return word.lower()


def _features(i: int, word: str, context: Sequence[str], prev: str, prev2: str) -> dict[str, int]:
    feats: dict[str, int] = defaultdict(int)

    def add(name, *args):
        feats[" ".join((name,) + tuple(args))] += 1

    i += len(START)
    add("bias")
    add("i suffix", word[-3:])
    add("i suffix2", word[-2:])
    add("i pref1", word[:1])
    add("i-1 tag", prev)
    add("i-2 tag", prev2)
    add("i tag+i-2 tag", prev, prev2)
    add("i word", context[i])
    add("i-1 tag+i word", prev, context[i])
    add("i-1 tag+i suffix", prev, word[-3:])
    add("i-1 word", context[i - 1])
    add("i-1 suffix", context[i - 1][-3:])
    add("i-2 word", context[i - 2])
    add("i+1 word", context[i + 1])
    add("i+1 suffix", context[i + 1][-3:])
    add("i+2 word", context[i + 2])
    return feats


class PerceptronTagger:
    """Greedy averaged-perceptron tagger with closed-class lexicon and suffix fallback."""

    def __init__(self, model: AveragedPerceptron | None = None, tagdict: dict[str, str] | None = None):
        self.model = model or AveragedPerceptron()
        self.tagdict = dict(closed_class_lexicon()) if tagdict is None else tagdict

    def tag(self, tokens: Sequence[str]) -> list[str]:
        prev, prev2 = START
        context = list(START) + [_normalize(w) for w in tokens] + list(END)
        tags = []
        for i, word in enumerate(tokens):
            norm = _normalize(word)
            tag = self.tagdict.get(norm)
            if tag is None:
                tag = self.model.predict(_features(i, norm, context, prev, prev2)) or suffix_fallback(norm)
            tags.append(tag)
            prev2, prev = prev, tag
        return tags

    def train(self, sentences: Sequence[Sequence[tuple[str, str]]], n_iter: int = 5, seed: int = 0) -> None:
        self.model.classes = set(TAGSET)
        rng = random.Random(seed)
        sentences = [list(s) for s in sentences]
        for _ in range(n_iter):
            for sentence in sentences:
                words = [w for w, _ in sentence]
                prev, prev2 = START
                context = list(START) + [_normalize(w) for w in words] + list(END)
                for i, (word, truth) in enumerate(sentence):
                    norm = _normalize(word)
                    guess = self.tagdict.get(norm)
                    if guess is None:
                        feats = _features(i, norm, context, prev, prev2)
                        guess = self.model.predict(feats)
                        self.model.update(truth, guess, feats)
                    prev2, prev = prev, guess
            rng.shuffle(sentences)
        self.model.average_weights()

    def save(self, path) -> None:
        """Flat key-value file: ``W<TAB>feature<TAB>tag<TAB>weight`` and ``D<TAB>word<TAB>tag`` lines."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("C\t" + "\t".join(sorted(self.model.classes)) + "\n")
            for word, tag in sorted(self.tagdict.items()):
                fh.write(f"D\t{word}\t{tag}\n")
            for feat in sorted(self.model.weights):
                for tag, weight in sorted(self.model.weights[feat].items()):
                    fh.write(f"W\t{feat}\t{tag}\t{weight!r}\n")

    @classmethod
    def load(cls, path) -> "PerceptronTagger":
        with open(path, encoding="utf-8") as fh:
            return cls._from_lines(fh)

    @classmethod
    def _from_lines(cls, lines: Iterable[str]) -> "PerceptronTagger":
        model = AveragedPerceptron()
        tagdict = {}
        for line in lines:
            parts = line.rstrip("\n").split("\t")
            if parts[0] == "C":
                model.classes = set(parts[1:])
            elif parts[0] == "D":
                tagdict[parts[1]] = parts[2]
            elif parts[0] == "W":
                model.weights.setdefault(parts[1], {})[parts[2]] = float(parts[3])
        return cls(model, tagdict)


_DEFAULT: PerceptronTagger | None = None


def default_tagger() -> PerceptronTagger:
    """The bundled seed model."""
    global _DEFAULT
    if _DEFAULT is None:
        text = (resources.files("dialign") / "data" / "tagger.weights").read_text(encoding="utf-8")
        _DEFAULT = PerceptronTagger._from_lines(text.splitlines())
    return _DEFAULT


def pos_tag(doc: TokenizedDoc, model: PerceptronTagger | None = None) -> TokenizedDoc:
    """Attach one coarse tag per token."""
    tagger = model or default_tagger()
    return doc.with_tokens(doc.tokens, tagger.tag(doc.tokens))
