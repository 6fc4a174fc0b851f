from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.annotation_models import AnnotatedSentence


class Platform(str, Enum):
    MTURK = "mturk"
    PROLIFIC = "prolific"
    OTHER = "other"


class Phase(str, Enum):
    DURING = "during"
    AFTER = "after"


class CarCode(str, Enum):
    CONCRETE = "C"
    ABSTRACT = "A"
    RELATIONAL = "R"


class OpenCode(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


# Named stories; any other story name is kept verbatim
KNOWN_STORIES = ("best_farm", "celebrations")


class DemographicGroup(str, Enum):
    """The four (Latinx, caregiver) cells used for template sensitivity."""

    LATINX_CAREGIVER = "latinx_caregiver"
    LATINX_NONCAREGIVER = "latinx_noncaregiver"
    NONLATINX_CAREGIVER = "nonlatinx_caregiver"
    NONLATINX_NONCAREGIVER = "nonlatinx_noncaregiver"

    @classmethod
    def from_flags(cls, is_latinx: bool, is_caregiver: bool) -> "DemographicGroup":
        prefix = "latinx" if is_latinx else "nonlatinx"
        suffix = "caregiver" if is_caregiver else "noncaregiver"
        return cls(f"{prefix}_{suffix}")

    @property
    def is_latinx(self) -> bool:
        return not self.value.startswith("non")

    @property
    def is_caregiver(self) -> bool:
        return not self.value.endswith("noncaregiver")


class DemographicProfile(BaseModel):
    """
    Respondent demographics.

    Attributes:
        is_caregiver (bool): Respondent cares for a child
        is_latinx (bool): Respondent identifies as Hispanic/Latinx
        platform (Platform): Crowdsourcing platform
        read_frequency (int): 0-3, Rarely / Sometimes / Frequently / Very Frequently
        experience_related_to_story (bool): Respondent reported a life
            experience related to the story
    """

    model_config = ConfigDict(frozen=True)

    is_caregiver: bool
    is_latinx: bool
    platform: Platform
    read_frequency: int = Field(ge=0, le=3)
    experience_related_to_story: bool

    @property
    def group(self) -> DemographicGroup:
        return DemographicGroup.from_flags(self.is_latinx, self.is_caregiver)


class CodedQuestion(BaseModel):
    """One caregiver question with both coding schemes applied."""

    model_config = ConfigDict(frozen=True)

    question_id: str
    participant_id: str
    story: str
    page: int = Field(ge=1)
    phase: Phase
    text: str
    car_code: CarCode
    open_code: OpenCode
    trigger_sentence: Optional[str] = None
    coder_id: Optional[str] = None


class ParticipantRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    profile: DemographicProfile
    questions: Tuple[CodedQuestion, ...] = ()


class RejectedRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    row: int
    reason: str
    values: Dict[str, str] = Field(default_factory=dict)


class SurveyCorpus(BaseModel):
    """
    Survey responses keyed by participant.

    Attributes:
        responses (Dict[str, ParticipantRecord]): participant_id -> profile
            and that participant's questions
        rejected (List[RejectedRow]): Rows refused at load time
    """

    model_config = ConfigDict(frozen=True)

    responses: Dict[str, ParticipantRecord] = Field(default_factory=dict)
    rejected: Tuple[RejectedRow, ...] = ()

    @model_validator(mode="after")
    def _questions_belong_to_participant(self) -> "SurveyCorpus":
        for participant_id, record in self.responses.items():
            for question in record.questions:
                if question.participant_id != participant_id:
                    raise ValueError(
                        f"question {question.question_id} filed under {participant_id} "
                        f"but belongs to {question.participant_id}"
                    )
        return self

    def questions(self) -> List[CodedQuestion]:
        """All questions in participant then file order"""
        return [q for record in self.responses.values() for q in record.questions]

    def profile_of(self, participant_id: str) -> DemographicProfile:
        return self.responses[participant_id].profile


class CorpusBundle(BaseModel):
    """Validated survey corpus plus one annotation per question id."""

    model_config = ConfigDict(frozen=True)

    corpus: SurveyCorpus
    annotations: Dict[str, AnnotatedSentence] = Field(default_factory=dict)
