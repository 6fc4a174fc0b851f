from enum import Enum
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.annotation_models import SlotLabel
from models.corpus_models import CarCode, DemographicGroup, OpenCode


class ElementKind(str, Enum):
    LITERAL = "lit"
    SLOT = "slot"


class Element(BaseModel):
    """A template element: a literal word or a tag slot."""

    model_config = ConfigDict(frozen=True)

    kind: ElementKind
    value: str

    @field_validator("value")
    @classmethod
    def _not_empty(cls, value: str) -> str:
        if not value:
            raise ValueError("template elements cannot be empty strings")
        return value

    @model_validator(mode="after")
    def _slot_value_is_label(self) -> "Element":
        if self.kind == ElementKind.SLOT:
            SlotLabel(self.value)
        return self

    @classmethod
    def literal(cls, word: str) -> "Element":
        return cls(kind=ElementKind.LITERAL, value=word)

    @classmethod
    def slot(cls, label: SlotLabel) -> "Element":
        return cls(kind=ElementKind.SLOT, value=SlotLabel(label).value)

    @property
    def is_slot(self) -> bool:
        return self.kind == ElementKind.SLOT

    @property
    def label(self) -> SlotLabel:
        return SlotLabel(self.value)


class Template(BaseModel):
    """
    Question skeleton extracted from one coded question.

    Attributes:
        template_id (str): Content hash of elements, codes and demographic
        elements (Tuple[Element, ...]): Literal words and slots in order
        car_code (CarCode): Concrete / Abstract / Relational
        open_code (OpenCode): Open or closed ended
        demographic (DemographicGroup): Demographic of the source respondent
        source_question_id (str): First question this template came from
        duplicate_count (int): Number of identical questions merged into it
        dataset (str): Provenance tag of the source question set
    """

    model_config = ConfigDict(frozen=True)

    template_id: str
    elements: Tuple[Element, ...]
    car_code: CarCode
    open_code: OpenCode
    demographic: DemographicGroup
    source_question_id: str
    duplicate_count: int = Field(default=1, ge=1)
    dataset: str = "base"

    @model_validator(mode="after")
    def _has_slot(self) -> "Template":
        if not self.elements:
            raise ValueError("template needs at least one element")
        if not any(element.is_slot for element in self.elements):
            raise ValueError("template needs at least one slot")
        return self

    @property
    def slots(self) -> List[Tuple[int, SlotLabel]]:
        """(element position, label) for every slot, in order"""
        return [
            (position, element.label)
            for position, element in enumerate(self.elements)
            if element.is_slot
        ]

    @property
    def stored_form(self) -> str:
        return " ".join(element.value for element in self.elements)


class TemplateCorpus(BaseModel):
    """
    A deduplicated set of templates.

    Attributes:
        templates (List[Template]): Templates in insertion order
        slot_config (List[SlotLabel]): Slot labels the templates may use
        provenance (List[str]): Source dataset identifiers
    """

    model_config = ConfigDict(frozen=True)

    templates: Tuple[Template, ...] = ()
    slot_config: Tuple[SlotLabel, ...] = tuple(SlotLabel)
    provenance: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_ids_and_slots(self) -> "TemplateCorpus":
        seen = set()
        allowed = set(self.slot_config)
        for template in self.templates:
            if template.template_id in seen:
                raise ValueError(f"duplicate template id {template.template_id}")
            seen.add(template.template_id)
            for _, label in template.slots:
                if label not in allowed:
                    raise ValueError(
                        f"template {template.template_id} uses slot {label.value} "
                        "outside the configured slot set"
                    )
        return self

    def __len__(self) -> int:
        return len(self.templates)

    def by_car_code(self) -> Dict[CarCode, List[Template]]:
        partitions: Dict[CarCode, List[Template]] = {code: [] for code in CarCode}
        for template in self.templates:
            partitions[template.car_code].append(template)
        return partitions


class RankedTemplate(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: int
    score: float = Field(ge=0.0)
    template: Template


class RankedTemplates(BaseModel):
    """
    Templates in descending score order, ties broken by template_id.

    Attributes:
        entries (List[RankedTemplate]): Ranked templates, rank starting at 1
        k_values (List[int]): Rank depths reported with this ranking
    """

    model_config = ConfigDict(frozen=True)

    entries: Tuple[RankedTemplate, ...] = ()
    k_values: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _check_order(self) -> "RankedTemplates":
        for before, after in zip(self.entries, self.entries[1:]):
            if after.score > before.score:
                raise ValueError("ranked scores must be non-increasing")
            if (
                after.score == before.score
                and after.template.template_id < before.template.template_id
            ):
                raise ValueError("score ties must be ordered by template_id")
        return self

    def __len__(self) -> int:
        return len(self.entries)

    def top(self, k: int) -> List[RankedTemplate]:
        return list(self.entries[:k])


class TemplateProportions(BaseModel):
    """Share of the top-k templates per demographic group, in percent."""

    model_config = ConfigDict(frozen=True)

    k: int
    percentages: Dict[DemographicGroup, float]
