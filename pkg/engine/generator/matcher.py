from typing import Dict, Optional

from engine.generator.compatibility import binds_via_deprel, is_compatible
from models.annotation_models import AnnotatedSentence, SlotLabel, Token
from models.generation_models import BoundToken, SlotBinding
from models.template_models import Template


def match_template(
    template: Template, sentence: AnnotatedSentence, anchor_literals: bool = False
) -> Optional[SlotBinding]:
    """
    Bind template slots to sentence tokens, greedy left to right.

    Each slot takes the earliest compatible token after the token bound to
    the previous slot. Literals need no support in the sentence. The
    result is the leftmost order-preserving assignment, and greedy choice
    finds one whenever any exists.

    With anchor_literals, a literal equal (case-insensitively) to the token
    at the cursor consumes that token, so a template matched against its own
    source binds every slot to the token it abstracted. When the anchored
    pass finds no assignment the plain greedy one is returned.

    Args:
        template (Template): Template with at least one slot
        sentence (AnnotatedSentence): Annotated source sentence
        anchor_literals (bool): Let literals consume the tokens they spell

    Returns:
        Optional[SlotBinding]: The binding, or None when no assignment exists
    """
    if anchor_literals:
        anchored = _greedy(template, sentence, anchor_literals=True)
        if anchored is not None:
            return anchored
    return _greedy(template, sentence, anchor_literals=False)


def _greedy(
    template: Template, sentence: AnnotatedSentence, anchor_literals: bool
) -> Optional[SlotBinding]:
    tokens = sentence.tokens
    bound: Dict[int, BoundToken] = {}
    cursor = 0
    for position, element in enumerate(template.elements):
        if not element.is_slot:
            if (
                anchor_literals
                and cursor < len(tokens)
                and tokens[cursor].form.lower() == element.value.lower()
            ):
                cursor += 1
            continue
        while cursor < len(tokens) and not is_compatible(element.label, tokens[cursor]):
            cursor += 1
        if cursor == len(tokens):
            return None
        bound[position] = _bound(element.label, tokens[cursor])
        cursor += 1
    return SlotBinding(slots=bound)


def _bound(label: SlotLabel, token: Token) -> BoundToken:
    return BoundToken(
        token_index=token.index,
        form=token.form,
        lemma=token.lemma,
        upos=token.upos,
        via_deprel=binds_via_deprel(label, token),
    )
