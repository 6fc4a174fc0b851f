from typing import List

from engine.annotation.surface import detokenize, expand_contraction
from models.generation_models import BoundToken, SlotBinding
from models.template_models import Template
from utils.exceptions import UnboundSlot


def _surface(bound: BoundToken) -> str:
    form = expand_contraction(bound.form, bound.lemma, bound.upos)
    # Sentence-initial capitals are not kept mid-question
    if bound.token_index == 0 and bound.upos != "PROPN" and form != "I":
        form = form[0].lower() + form[1:]
    return form


def ensure_question_mark(text: str) -> str:
    """Exactly one trailing '?'"""
    text = text.rstrip()
    stripped = text.rstrip("?.!,;: ")
    return stripped + "?"


def fill_template(template: Template, binding: SlotBinding) -> str:
    """
    Substitute bound words into a template (raw stage).

    Contracted auxiliaries are expanded; literals are kept verbatim.

    Args:
        template (Template): Template to fill
        binding (SlotBinding): Slot position -> bound token

    Returns:
        str: Detokenized question ending in a single '?'

    Raises:
        UnboundSlot: A slot of the template has no bound token
    """
    forms: List[str] = []
    for position, element in enumerate(template.elements):
        if not element.is_slot:
            forms.append(element.value)
            continue
        bound = binding.slots.get(position)
        if bound is None:
            raise UnboundSlot(
                f"slot {element.value} at position {position} is unbound",
                template_id=template.template_id,
            )
        forms.append(_surface(bound))
    return ensure_question_mark(detokenize(forms))
