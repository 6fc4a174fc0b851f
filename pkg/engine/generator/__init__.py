"""
Generator

Template-to-sentence matching, slot filling, rule-based repair and
page-level question generation with an optional paraphrase stage.
"""

from engine.generator.compatibility import (
    COMPATIBILITY_TABLE,
    binds_via_deprel,
    is_compatible,
)
from engine.generator.filler import ensure_question_mark, fill_template
from engine.generator.matcher import match_template
from engine.generator.question_generator import (
    GeneratorConfig,
    QuestionGenerator,
    generate_for_page,
)
from engine.generator.repair import collapse_duplicates, reattach_determiners, rule_fix
from utils.paraphrase_client import ParaphraseClient, paraphrase_remote

__all__ = [
    "COMPATIBILITY_TABLE",
    "binds_via_deprel",
    "is_compatible",
    "match_template",
    "fill_template",
    "ensure_question_mark",
    "rule_fix",
    "reattach_determiners",
    "collapse_duplicates",
    "GeneratorConfig",
    "QuestionGenerator",
    "generate_for_page",
    "ParaphraseClient",
    "paraphrase_remote",
]
