from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

# The 17 Universal POS tags
UPOS_TAGS = frozenset(
    {
        "NOUN",
        "VERB",
        "AUX",
        "DET",
        "ADP",
        "PRON",
        "PROPN",
        "ADJ",
        "ADV",
        "NUM",
        "PART",
        "CCONJ",
        "SCONJ",
        "INTJ",
        "SYM",
        "PUNCT",
        "X",
    }
)


class Token(BaseModel):
    """
    One annotated token.

    Attributes:
        index (int): 0-based position in the sentence
        form (str): Surface string
        lemma (str): Lemma, may equal form
        upos (str): Universal POS tag
        deprel (Optional[str]): Lowercase dependency label, absent for
            fallback-tagged text
        head (Optional[int]): CoNLL-U HEAD column, kept for serialization
    """

    model_config = ConfigDict(frozen=True)

    index: int
    form: str
    lemma: str
    upos: str
    deprel: Optional[str] = None
    head: Optional[int] = None

    @field_validator("form")
    @classmethod
    def _form_not_empty(cls, value: str) -> str:
        if not value:
            raise ValueError("token form must be non-empty")
        return value

    @field_validator("upos")
    @classmethod
    def _known_upos(cls, value: str) -> str:
        if value not in UPOS_TAGS:
            raise ValueError(f"unknown UPOS tag {value!r}")
        return value


class AnnotatedSentence(BaseModel):
    """
    A tokenized, tagged sentence.

    Attributes:
        sentence_id (str): Identifier (CoNLL-U sent_id or question id)
        text (str): Original surface string
        tokens (List[Token]): Tokens with contiguous 0-based indices
        page (Optional[int]): Story page the sentence belongs to, if known
    """

    model_config = ConfigDict(frozen=True)

    sentence_id: str
    text: str
    tokens: List[Token]
    page: Optional[int] = None

    @model_validator(mode="after")
    def _check_tokens(self) -> "AnnotatedSentence":
        if not self.tokens:
            raise ValueError("sentence must contain at least one token")
        for position, token in enumerate(self.tokens):
            if token.index != position:
                raise ValueError(
                    f"token indices must be contiguous from 0, got {token.index} at {position}"
                )
        return self

    @property
    def forms(self) -> List[str]:
        return [token.form for token in self.tokens]


class SlotLabel(str, Enum):
    """Abstraction labels a template slot can carry."""

    NSUBJ = "NSUBJ"
    DOBJ = "DOBJ"
    POBJ = "POBJ"
    ROOT = "ROOT"
    AUX = "AUX"
    DET = "DET"
    PREP = "PREP"
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    PROPN = "PROPN"


# deprel -> dependency slot
DEPREL_SLOTS = {
    "nsubj": SlotLabel.NSUBJ,
    "dobj": SlotLabel.DOBJ,
    "pobj": SlotLabel.POBJ,
    "root": SlotLabel.ROOT,
}

# upos -> POS slot
UPOS_SLOTS = {
    "AUX": SlotLabel.AUX,
    "DET": SlotLabel.DET,
    "ADP": SlotLabel.PREP,
    "NOUN": SlotLabel.NOUN,
    "VERB": SlotLabel.VERB,
    "ADJ": SlotLabel.ADJ,
    "PROPN": SlotLabel.PROPN,
}
