"""
Annotation

Token/tag data handling: CoNLL-U ingestion, the fallback tagger used for
fixtures and unannotated questions, and surface-text assembly.
"""

from engine.annotation.conllu_reader import (
    normalize_deprel,
    parse_conllu,
    read_conllu,
    serialize_conllu,
)
from engine.annotation.fallback_tagger import (
    fallback_tag,
    load_lexicon,
)
from engine.annotation.surface import detokenize, expand_contraction, tokenize_surface

__all__ = [
    "parse_conllu",
    "read_conllu",
    "serialize_conllu",
    "normalize_deprel",
    "fallback_tag",
    "load_lexicon",
    "detokenize",
    "expand_contraction",
    "tokenize_surface",
]
