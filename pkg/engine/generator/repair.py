"""
Deterministic grammar repair for filled questions.

Repairs run in a fixed order: determiner reattachment, first-word
capitalization, adjacent duplicate collapse, single trailing '?'.
Applying the repair twice gives the same text as applying it once.
"""

from typing import List, Optional

from engine.annotation.surface import detokenize, tokenize_surface
from engine.generator.filler import ensure_question_mark
from models.annotation_models import AnnotatedSentence
from models.generation_models import SlotBinding

NOMINAL_UPOS = ("NOUN", "PROPN")


def _find(words: List[str], form: str, start: int) -> Optional[int]:
    target = form.lower()
    for index in range(start, len(words)):
        if words[index].lower() == target:
            return index
    return None


def reattach_determiners(
    words: List[str], sentence: AnnotatedSentence, binding: SlotBinding
) -> List[str]:
    """Insert the source determiner before each bound noun that lost it"""
    words = list(words)
    tokens = sentence.tokens
    cursor = 0
    for position in sorted(binding.slots):
        bound = binding.slots[position]
        found = _find(words, bound.form, cursor)
        if found is None:
            continue
        cursor = found + 1
        if bound.upos not in NOMINAL_UPOS or bound.token_index == 0:
            continue
        previous = tokens[bound.token_index - 1]
        if previous.upos != "DET":
            continue
        if found > 0 and words[found - 1].lower() == previous.form.lower():
            continue
        words.insert(found, previous.form.lower())
        cursor += 1
    return words


def collapse_duplicates(words: List[str]) -> List[str]:
    collapsed: List[str] = []
    for word in words:
        if collapsed and collapsed[-1].lower() == word.lower():
            continue
        collapsed.append(word)
    return collapsed


def rule_fix(raw: str, sentence: AnnotatedSentence, binding: SlotBinding) -> str:
    """
    Repair a raw filled question.

    Args:
        raw (str): Question from fill_template
        sentence (AnnotatedSentence): Source sentence the binding points into
        binding (SlotBinding): Slot binding the question was filled from

    Returns:
        str: The repaired question (stage rule_fixed)
    """
    words = tokenize_surface(raw)
    if not words:
        return "?"
    words = reattach_determiners(words, sentence, binding)
    words = collapse_duplicates(words)
    # detokenize capitalizes the first word
    return ensure_question_mark(detokenize(words))
