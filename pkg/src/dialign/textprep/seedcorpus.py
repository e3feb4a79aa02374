"""Template-generated tagged sentences used to train the bundled tagger.

Run ``python -m dialign.textprep.seedcorpus OUT`` to regenerate the weights file.
"""

from __future__ import annotations

import random
import sys

from .tagger import PerceptronTagger

NOUNS = [
    ("dog", "dogs"), ("cat", "cats"), ("car", "cars"), ("house", "houses"), ("friend", "friends"),
    ("city", "cities"), ("beach", "beaches"), ("toast", "toasts"), ("game", "games"), ("school", "schools"),
    ("team", "teams"), ("truck", "trucks"), ("book", "books"), ("road", "roads"), ("job", "jobs"),
    ("kid", "kids"), ("mountain", "mountains"), ("track", "tracks"), ("bach", "baches"), ("ute", "utes"),
    ("tramp", "tramps"), ("hike", "hikes"), ("walk", "walks"), ("coffee", "coffees"), ("dinner", "dinners"),
    ("town", "towns"), ("street", "streets"), ("shop", "shops"), ("meal", "meals"), ("bird", "birds"),
    ("day", "days"), ("week", "weeks"), ("weekend", "weekends"), ("night", "nights"), ("bus", "buses"),
    ("country", "countries"), ("window", "windows"), ("table", "tables"), ("pie", "pies"), ("party", "parties"),
    ("mate", "mates"), ("bloke", "blokes"), ("lolly", "lollies"), ("biscuit", "biscuits"), ("boot", "boots"),
    ("flat", "flats"), ("lift", "lifts"), ("trip", "trips"), ("cake", "cakes"), ("sausage", "sausages"),
    ("teacher", "teachers"), ("student", "students"), ("river", "rivers"), ("lake", "lakes"), ("work", "works"),
    ("fish", "fish"), ("tea", "teas"), ("chip", "chips"), ("question", "questions"), ("problem", "problems"),
    ("accident", "accidents"), ("home", "homes"), ("hill", "hills"), ("purpose", "purposes"), ("toilet", "toilets"),
    ("lawn", "lawns"), ("jandal", "jandals"), ("swim", "swims"), ("pool", "pools"), ("sweater", "sweaters"),
]
MASS_NOUNS = ["bread", "rugby", "weather", "money", "water", "rain", "government", "food", "traffic", "petrol"]

# base, 3sg, past, past participle, gerund
VERBS = [
    ("run", "runs", "ran", "run", "running"), ("walk", "walks", "walked", "walked", "walking"),
    ("hike", "hikes", "hiked", "hiked", "hiking"), ("tramp", "tramps", "tramped", "tramped", "tramping"),
    ("eat", "eats", "ate", "eaten", "eating"), ("burn", "burns", "burnt", "burnt", "burning"),
    ("burn", "burns", "burned", "burned", "burning"), ("dream", "dreams", "dreamt", "dreamt", "dreaming"),
    ("dream", "dreams", "dreamed", "dreamed", "dreaming"), ("learn", "learns", "learnt", "learnt", "learning"),
    ("learn", "learns", "learned", "learned", "learning"), ("go", "goes", "went", "gone", "going"),
    ("see", "sees", "saw", "seen", "seeing"), ("make", "makes", "made", "made", "making"),
    ("take", "takes", "took", "taken", "taking"), ("buy", "buys", "bought", "bought", "buying"),
    ("drive", "drives", "drove", "driven", "driving"), ("cook", "cooks", "cooked", "cooked", "cooking"),
    ("love", "loves", "loved", "loved", "loving"), ("like", "likes", "liked", "liked", "liking"),
    ("break", "breaks", "broke", "broken", "breaking"), ("find", "finds", "found", "found", "finding"),
    ("play", "plays", "played", "played", "playing"), ("watch", "watches", "watched", "watched", "watching"),
    ("visit", "visits", "visited", "visited", "visiting"), ("build", "builds", "built", "built", "building"),
    ("leave", "leaves", "left", "left", "leaving"), ("get", "gets", "got", "gotten", "getting"),
    ("write", "writes", "wrote", "written", "writing"), ("give", "gives", "gave", "given", "giving"),
    ("know", "knows", "knew", "known", "knowing"), ("wipe", "wipes", "wiped", "wiped", "wiping"),
    ("spell", "spells", "spelt", "spelt", "spelling"), ("spoil", "spoils", "spoilt", "spoilt", "spoiling"),
    ("bake", "bakes", "baked", "baked", "baking"), ("fix", "fixes", "fixed", "fixed", "fixing"),
    ("park", "parks", "parked", "parked", "parking"), ("need", "needs", "needed", "needed", "needing"),
    ("want", "wants", "wanted", "wanted", "wanting"), ("call", "calls", "called", "called", "calling"),
    ("move", "moves", "moved", "moved", "moving"), ("say", "says", "said", "said", "saying"),
    ("think", "thinks", "thought", "thought", "thinking"), ("pay", "pays", "paid", "paid", "paying"),
]
TRANSITIVE_ONLY = {"eat", "burn", "make", "take", "buy", "cook", "love", "like", "break", "find", "watch", "visit",
                   "build", "get", "give", "wipe", "bake", "fix", "need", "want", "pay", "spoil", "see", "write", "know"}
ADJ_PARTICIPLES = ["burnt", "broken", "cooked", "baked", "spoilt", "used", "tired", "fixed", "parked", "learned", "dreamt"]
ADJECTIVES = ["good", "big", "small", "old", "new", "cold", "hot", "sweet", "nice", "great", "local", "cheap", "long",
              "short", "happy", "busy", "quiet", "green", "red", "wet", "dry", "fresh", "keen", "sick", "hard",
              "easy", "beautiful", "terrible", "expensive", "awesome", "true", "real", "whole", "famous"]
ADVERBS = ["really", "very", "quickly", "always", "often", "never", "usually", "just", "actually", "probably",
           "here", "there", "today", "tomorrow", "yesterday", "now", "too", "again", "also", "slowly", "finally",
           "already", "still", "soon", "definitely", "honestly"]
PARTICLES = ["down", "up", "out", "off", "into", "over", "through", "with", "against"]
PREPS = ["in", "on", "at", "to", "from", "with", "for", "near", "after", "before", "about", "across"]
DETS = ["the", "a", "this", "my", "your", "our", "their", "every", "some", "that"]
PRONOUNS = ["i", "you", "he", "she", "it", "we", "they"]
OBJ_PRONOUNS = ["it", "them", "him", "her", "me", "us"]
MODALS = ["can", "could", "will", "would", "should", "might", "must"]
CONJ = ["and", "but", "or", "so"]

# slot spec -> (word chooser key, tag)
TEMPLATES = [
    "PRP V.past DET N.s",
    "PRP V.past OBJ",
    "DET APART N.s V.past ADV",
    "DET APART N.s was ADJ",
    "PRP V.past DET APART N.s",
    "DET ADJ N.s V.3sg ADV",
    "PRP has V.pp DET N.p",
    "PRP have V.pp OBJ ADV",
    "PRP MOD V.base DET N.s PREP DET N.s",
    "PRP was V.ing PREP DET N.s",
    "DET N.p V.past ADV",
    "PRP V.3sg DET ADJ N.p",
    "PRP V.past PREP DET N.s",
    "V.base DET N.s ADV",
    "DET N.s V.3sg PART",
    "PRP V.3sg PART",
    "PRP V.past PART DET N.s",
    "PRP V.base V.ing",
    "PRP V.base V.ing PREP DET N.p",
    "V.ing is ADJ",
    "V.ing PREP DET N.s is ADJ",
    "PRP MOD be V.pp",
    "DET N.s MOD be V.pp ADV",
    "DET N.s was V.pp PREP DET N.s",
    "DET N.p were V.pp",
    "DET ADJ N.s PREP DET N.p",
    "PRP V.past DET ADJ N.s ADV",
    "PRP V.past CONJ V.past DET N.s",
    "N.p V.base ADJ",
    "N.mass is ADJ ADV",
    "PRP V.past N.mass PREP DET N.s",
    "DET N.s V.past DET N.s PREP DET N.s",
    "PRP ADV V.past DET N.p",
    "PRP V.base DET N.s CONJ PRP V.3sg OBJ",
    "PRP did not V.base DET N.s",
    "PRP MOD not V.base OBJ",
    "PRP had V.pp DET N.s",
    "DET N.s is ADV ADJ",
    "PRP V.past N.p PREP N.mass",
    "PREP DET N.s PRP V.past DET ADJ N.s",
    "DET N.s V.3sg",
    "DET ADJ N.s V.3sg",
    "PRP V.3sg",
    "N.p V.base",
    "DET N.p V.base ADV",
    "PRP V.past DET N.s PREP N.s",
    "PRP V.past PREP N.s",
    "PRP V.past N.s ADV",
    "DET N.s V.3sg PREP DET N.s",
    "PRP has V.past",
    "DET N.s N.s is ADJ",
    "PRP V.past DET N.s N.s",
]

FIXED_TAGS = {
    "was": "VBD", "were": "VBD", "is": "VB", "has": "VB", "have": "VB", "be": "VB", "did": "VBD",
    "not": "OTHER", "had": "VBD",
}


def _fill(slot: str, rng: random.Random) -> tuple[str, str]:
    if slot in FIXED_TAGS:
        return slot, FIXED_TAGS[slot]
    if slot == "PRP":
        return rng.choice(PRONOUNS), "PRP"
    if slot == "OBJ":
        return rng.choice(OBJ_PRONOUNS), "PRP"
    if slot == "DET":
        return rng.choice(DETS), "DET"
    if slot == "MOD":
        return rng.choice(MODALS), "MOD"
    if slot == "CONJ":
        return rng.choice(CONJ), "OTHER"
    if slot == "ADV":
        return rng.choice(ADVERBS), "RB"
    if slot == "ADJ":
        return rng.choice(ADJECTIVES), "JJ"
    if slot == "APART":
        return rng.choice(ADJ_PARTICIPLES), "JJ"
    if slot == "PREP":
        return rng.choice(PREPS), "IN"
    if slot == "PART":
        return rng.choice(PARTICLES), "IN"
    if slot == "N.s":
        return rng.choice(NOUNS)[0], "NN"
    if slot == "N.p":
        return rng.choice(NOUNS)[1], "NNS"
    if slot == "N.mass":
        return rng.choice(MASS_NOUNS), "NN"
    if slot.startswith("V."):
        form = slot[2:]
        verb = rng.choice(VERBS)
        idx, tag = {"base": (0, "VB"), "3sg": (1, "VB"), "past": (2, "VBD"), "pp": (3, "VBN"), "ing": (4, "VBG")}[form]
        return verb[idx], tag
    raise KeyError(slot)


def generate(n_sentences: int = 6000, seed: int = 13) -> list[list[tuple[str, str]]]:
    rng = random.Random(seed)
    out = []
    for _ in range(n_sentences):
        template = rng.choice(TEMPLATES)
        out.append([_fill(slot, rng) for slot in template.split()])
    return out


def train_seed_tagger(n_sentences: int = 6000, seed: int = 13, n_iter: int = 5) -> PerceptronTagger:
    tagger = PerceptronTagger()
    tagger.train(generate(n_sentences, seed), n_iter=n_iter, seed=seed)
    return tagger


if __name__ == "__main__":  # pragma: no cover
    train_seed_tagger().save(sys.argv[1])
