"""Text preparation: normalisation, tokenisation, masking, phrases, tagging."""

from .gazetteer import EntityMasker, Gazetteer, default_gazetteers, expand_macron_variants, load_gazetteer, mask_entities
from .phrases import PhraseModel, apply_phrases, learn_phrase_stages, learn_phrases
from .tagger import TAGSET, PerceptronTagger, default_tagger, pos_tag
from .text import STOPWORDS, TokenizedDoc, chunk, light_lemma, normalize, prepare, remove_stopwords, tokenize

__all__ = [
    "EntityMasker", "Gazetteer", "default_gazetteers", "expand_macron_variants", "load_gazetteer", "mask_entities",
    "PhraseModel", "apply_phrases", "learn_phrase_stages", "learn_phrases",
    "TAGSET", "PerceptronTagger", "default_tagger", "pos_tag",
    "STOPWORDS", "TokenizedDoc", "chunk", "light_lemma", "normalize", "prepare", "remove_stopwords", "tokenize",
]
