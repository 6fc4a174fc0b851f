from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from models.annotation_models import SlotLabel
from models.corpus_models import CarCode, Phase

DEFAULT_INTERROGATIVES = [
    "what",
    "why",
    "how",
    "who",
    "when",
    "where",
    "which",
    "do",
    "does",
    "did",
    "have",
    "has",
    "can",
    "could",
    "would",
    "will",
    "is",
    "are",
]


class SlotConfig(BaseModel):
    """
    Configuration settings for template extraction.

    Attributes:
        slot_set (List[SlotLabel]): Labels that may be abstracted into slots
        interrogative_whitelist (List[str]): Lowercase first-token words kept literal
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    slot_set: List[SlotLabel] = Field(default_factory=lambda: list(SlotLabel))
    interrogative_whitelist: List[str] = Field(
        default_factory=lambda: list(DEFAULT_INTERROGATIVES)
    )

    @field_validator("interrogative_whitelist")
    @classmethod
    def _lowercase(cls, value: List[str]) -> List[str]:
        return [word.lower() for word in value]


class ParaphraseConfig(BaseModel):
    """
    Configuration settings for the paraphrase service client.

    Attributes:
        url (str): Endpoint receiving POST {"text": ...}
        timeout_ms (int): Per-request timeout in milliseconds
        retries (int): Retries after the first attempt
        max_in_flight (int): Concurrent requests allowed
        backoff_factor (float): urllib3 retry backoff in seconds
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    url: str
    timeout_ms: int = Field(default=2000, gt=0)
    retries: int = Field(default=1, ge=0)
    max_in_flight: int = Field(default=4, ge=1)
    backoff_factor: float = Field(default=0.1, ge=0.0)


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    glm_tol: float = Field(default=1e-8, gt=0.0)
    max_iter: int = Field(default=100, ge=1)


class Config(BaseModel):
    """
    Run configuration. Absent keys take the defaults below.

    Attributes:
        slot_set (List[SlotLabel]): Abstraction labels for extraction
        interrogative_whitelist (List[str]): Literal first-token words
        top_k (int): Rank depth of the generation pool and template proportions
        max_per_sentence (int): Questions accepted per story sentence
        quota (Optional[Dict[CarCode, float]]): CAR shares, summing to 1
        paraphrase (Optional[ParaphraseConfig]): Remote paraphrase client
        tolerances (Tolerances): GLM convergence settings
        phases (List[Phase]): Prompt phases counted in per-participant totals
        lexicon_path (Optional[str]): Fallback tagger lexicon, bundled one if absent
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    slot_set: List[SlotLabel] = Field(default_factory=lambda: list(SlotLabel))
    interrogative_whitelist: List[str] = Field(
        default_factory=lambda: list(DEFAULT_INTERROGATIVES)
    )
    top_k: int = Field(default=50, ge=1)
    max_per_sentence: int = Field(default=3, ge=1)
    quota: Optional[Dict[CarCode, float]] = None
    paraphrase: Optional[ParaphraseConfig] = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    phases: List[Phase] = Field(default_factory=lambda: [Phase.DURING, Phase.AFTER])
    lexicon_path: Optional[str] = None

    @field_validator("quota", mode="before")
    @classmethod
    def _quota_from_list(cls, value):
        # [C, A, R] shares are accepted as a list
        if isinstance(value, (list, tuple)):
            if len(value) != len(CarCode):
                raise ValueError("quota lists give one share per C, A, R")
            return {code: share for code, share in zip(CarCode, value)}
        return value

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

    @field_validator("phases")
    @classmethod
    def _phases_not_empty(cls, value: List[Phase]) -> List[Phase]:
        if not value:
            raise ValueError("at least one phase must be counted")
        return value

    @property
    def slot_config(self) -> SlotConfig:
        return SlotConfig(
            slot_set=self.slot_set,
            interrogative_whitelist=self.interrogative_whitelist,
        )
