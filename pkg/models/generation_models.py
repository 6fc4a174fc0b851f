from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.corpus_models import CarCode, DemographicGroup, OpenCode


class Stage(str, Enum):
    RAW = "raw"
    RULE_FIXED = "rule_fixed"
    PARAPHRASED = "paraphrased"


class ParaphraseStatus(str, Enum):
    DISABLED = "disabled"
    OK = "ok"
    FAILED = "failed"


class BoundToken(BaseModel):
    """The sentence token a slot is bound to."""

    model_config = ConfigDict(frozen=True)

    token_index: int
    form: str
    lemma: str
    upos: str
    via_deprel: bool = False


class SlotBinding(BaseModel):
    """
    Order-preserving, injective assignment of sentence tokens to template slots.

    Attributes:
        slots (Dict[int, BoundToken]): template element position -> bound token
    """

    model_config = ConfigDict(frozen=True)

    slots: Dict[int, BoundToken]

    @model_validator(mode="after")
    def _order_preserving(self) -> "SlotBinding":
        indices = [self.slots[position].token_index for position in sorted(self.slots)]
        if any(later <= earlier for earlier, later in zip(indices, indices[1:])):
            raise ValueError("bound token indices must strictly increase in slot order")
        return self

    def token_indices(self) -> List[int]:
        return [self.slots[position].token_index for position in sorted(self.slots)]


class GeneratedQuestion(BaseModel):
    """A filled, repaired question with provenance."""

    model_config = ConfigDict(frozen=True)

    text: str
    template_id: str
    sentence_id: str
    binding: SlotBinding
    car_code: CarCode
    open_code: OpenCode
    stage: Stage
    page: Optional[int] = None
    rank: Optional[int] = None
    paraphrase_status: ParaphraseStatus = ParaphraseStatus.DISABLED
    paraphrase_error: Optional[str] = None

    @field_validator("text")
    @classmethod
    def _ends_with_question_mark(cls, value: str) -> str:
        if not value.endswith("?") or value.endswith("??"):
            raise ValueError("generated questions end with exactly one '?'")
        return value


class GenerationFilters(BaseModel):
    """
    Template pool restrictions for one generation run.

    Attributes:
        car_code (Optional[CarCode]): Keep only this CAR type
        open_code (Optional[OpenCode]): Keep only open or closed templates
        demographic (Optional[DemographicGroup]): Keep only this group's templates
        top_k (int): Rank depth of the pool after filtering
        max_per_sentence (int): Accepted matches per sentence
        quota (Optional[Dict[CarCode, float]]): CAR shares for round-robin selection
    """

    model_config = ConfigDict(frozen=True)

    car_code: Optional[CarCode] = None
    open_code: Optional[OpenCode] = None
    demographic: Optional[DemographicGroup] = None
    top_k: int = Field(default=50, ge=1)
    max_per_sentence: int = Field(default=3, ge=1)
    quota: Optional[Dict[CarCode, float]] = None

    @field_validator("quota")
    @classmethod
    def _quota_sums_to_one(cls, value):
        if value is None:
            return value
        if any(share < 0 for share in value.values()):
            raise ValueError("quota shares must be non-negative")
        if abs(sum(value.values()) - 1.0) > 1e-6:
            raise ValueError("quota shares must sum to 1")
        return value


class GenerationReport(BaseModel):
    """Counts describing one generation run. Contains no timestamps."""

    model_config = ConfigDict(frozen=True)

    sentences: int = 0
    sentences_without_match: int = 0
    questions: int = 0
    per_car_code: Dict[CarCode, int] = Field(default_factory=dict)
    duplicates_dropped: int = 0
    paraphrase_attempts: int = 0
    paraphrase_failures: int = 0


class GenerationRun(BaseModel):
    model_config = ConfigDict(frozen=True)

    questions: Tuple[GeneratedQuestion, ...] = ()
    report: GenerationReport = GenerationReport()


class ParaphraseRequest(BaseModel):
    text: str


class ParaphraseResponse(BaseModel):
    candidates: List[str] = Field(default_factory=list)


class ParaphraseResult(BaseModel):
    """Outcome of one paraphrase call; failures keep the input text."""

    model_config = ConfigDict(frozen=True)

    text: str
    stage: Stage
    status: ParaphraseStatus
    error: Optional[str] = None
