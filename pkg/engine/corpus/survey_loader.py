"""
Survey CSV ingestion.

Cells holding several questions are split on '?' so every CodedQuestion
carries exactly one question. Rows missing a mandatory value are rejected
and reported on the corpus; rows with an invalid value raise BadEnumValue.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
from loguru import logger
from pydantic import BaseModel, Field

from models.corpus_models import (
    KNOWN_STORIES,
    CarCode,
    CodedQuestion,
    DemographicProfile,
    OpenCode,
    ParticipantRecord,
    Phase,
    Platform,
    RejectedRow,
    SurveyCorpus,
)
from utils.exceptions import BadEnumValue, EmptyInput, MissingColumn

REQUIRED_COLUMNS = [
    "participant_id",
    "platform",
    "story",
    "is_caregiver",
    "is_latinx",
    "read_frequency",
    "experience_related",
    "page",
    "phase",
    "question_text",
    "car_code",
    "open_code",
]
OPTIONAL_COLUMNS = ["coder_id", "question_id", "trigger_sentence"]

FREQUENCY_LABELS = {
    "rarely": 0,
    "sometimes": 1,
    "frequently": 2,
    "very frequently": 3,
}
OPEN_CODES = {
    "open": OpenCode.OPEN,
    "o": OpenCode.OPEN,
    "closed": OpenCode.CLOSED,
    "c": OpenCode.CLOSED,
}


class SurveySchemaConfig(BaseModel):
    """
    Configuration settings for reading a survey export.

    Attributes:
        column_map (Dict[str, str]): canonical column -> header used in the file
        true_values (List[str]): Lowercase spellings of yes
        false_values (List[str]): Lowercase spellings of no
    """

    column_map: Dict[str, str] = Field(default_factory=dict)
    true_values: List[str] = Field(default_factory=lambda: ["true", "yes", "y", "1"])
    false_values: List[str] = Field(default_factory=lambda: ["false", "no", "n", "0"])

    def header(self, canonical: str) -> str:
        return self.column_map.get(canonical, canonical)


def split_questions(cell: str) -> List[str]:
    """
    Split a response cell into single questions on '?' boundaries.

    Every non-empty fragment gets its '?' back, including a trailing fragment
    written without one.
    """
    fragments = [fragment.strip() for fragment in cell.split("?")]
    return [f"{fragment}?" for fragment in fragments if fragment]


def normalize_story(value: str) -> str:
    story = "_".join(value.strip().lower().replace("-", " ").split())
    # "the_best_farm" and similar spellings of the two named stories
    for known in KNOWN_STORIES:
        if story == known or story.endswith("_" + known):
            return known
    return story


class _RowParser:
    """Converts one CSV record into typed values, raising BadEnumValue on bad cells."""

    def __init__(self, schema: SurveySchemaConfig, row_number: int, record: Dict[str, Any]):
        self.schema = schema
        self.row_number = row_number
        self.record = record

    def raw(self, canonical: str) -> str:
        value = self.record.get(self.schema.header(canonical), "")
        return "" if value is None else str(value).strip()

    def fail(self, canonical: str, value: str) -> BadEnumValue:
        return BadEnumValue(
            f"invalid value {value!r} for {canonical}", row=self.row_number, column=canonical
        )

    def boolean(self, canonical: str) -> bool:
        value = self.raw(canonical).lower()
        if value in self.schema.true_values:
            return True
        if value in self.schema.false_values:
            return False
        raise self.fail(canonical, value)

    def enum(self, canonical: str, enum_type):
        value = self.raw(canonical)
        try:
            return enum_type(value.lower())
        except ValueError:
            raise self.fail(canonical, value) from None

    def car_code(self) -> CarCode:
        value = self.raw("car_code")
        try:
            return CarCode(value.upper())
        except ValueError:
            raise self.fail("car_code", value) from None

    def open_code(self) -> OpenCode:
        value = self.raw("open_code")
        if value.lower() not in OPEN_CODES:
            raise self.fail("open_code", value)
        return OPEN_CODES[value.lower()]

    def read_frequency(self) -> int:
        value = self.raw("read_frequency")
        lowered = value.lower()
        if lowered in FREQUENCY_LABELS:
            return FREQUENCY_LABELS[lowered]
        if lowered.isdigit() and 0 <= int(lowered) <= 3:
            return int(lowered)
        raise self.fail("read_frequency", value)

    def page(self) -> int:
        value = self.raw("page")
        if not value.isdigit() or int(value) < 1:
            raise self.fail("page", value)
        return int(value)


def _read_frame(path: Union[str, Path]) -> Optional[pd.DataFrame]:
    """Read the CSV as strings; None when the file has no content at all"""
    if Path(path).stat().st_size == 0:
        return None
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        return None


def load_survey_csv(
    path: Union[str, Path], schema_config: Optional[SurveySchemaConfig] = None
) -> SurveyCorpus:
    """
    Load a survey export into a SurveyCorpus.

    Args:
        path: CSV file with a header row (UTF-8)
        schema_config (SurveySchemaConfig, optional): Column naming and boolean spellings

    Returns:
        SurveyCorpus: Participants with their split questions; rejected rows
            are listed on `rejected`

    Raises:
        MissingColumn: A required column is absent from the header
        BadEnumValue: A cell holds a value outside its allowed set
    """
    schema = schema_config or SurveySchemaConfig()
    frame = _read_frame(path)
    if frame is None or frame.empty:
        logger.warning(f"Survey file {path} has no data rows; corpus is empty")
        if frame is not None:
            _check_columns(frame, schema)
        return SurveyCorpus()
    _check_columns(frame, schema)

    profiles: Dict[str, DemographicProfile] = {}
    questions: Dict[str, List[CodedQuestion]] = {}
    rejected: List[RejectedRow] = []

    for offset, record in enumerate(frame.to_dict("records")):
        row_number = offset + 1
        parser = _RowParser(schema, row_number, record)

        missing = [
            column
            for column in ("participant_id", "question_text", "car_code", "open_code")
            if not parser.raw(column)
        ]
        if missing:
            rejected.append(
                RejectedRow(
                    row=row_number,
                    reason="missing " + ", ".join(missing),
                    values={key: str(value) for key, value in record.items()},
                )
            )
            continue

        participant_id = parser.raw("participant_id")
        profile = DemographicProfile(
            is_caregiver=parser.boolean("is_caregiver"),
            is_latinx=parser.boolean("is_latinx"),
            platform=parser.enum("platform", Platform),
            read_frequency=parser.read_frequency(),
            experience_related_to_story=parser.boolean("experience_related"),
        )
        if participant_id not in profiles:
            profiles[participant_id] = profile
            questions[participant_id] = []
        elif profiles[participant_id] != profile:
            logger.warning(
                f"Row {row_number}: demographics for {participant_id} differ from "
                "an earlier row; keeping the first"
            )

        car_code, open_code = parser.car_code(), parser.open_code()
        story = normalize_story(parser.raw("story"))
        page, phase = parser.page(), parser.enum("phase", Phase)
        base_id = parser.raw("question_id") or f"{participant_id}-r{row_number}"
        fragments = split_questions(parser.raw("question_text"))
        if not fragments:
            rejected.append(RejectedRow(row=row_number, reason="no question text"))
            continue

        for position, fragment in enumerate(fragments, start=1):
            question_id = base_id if len(fragments) == 1 else f"{base_id}-{position}"
            questions[participant_id].append(
                CodedQuestion(
                    question_id=question_id,
                    participant_id=participant_id,
                    story=story,
                    page=page,
                    phase=phase,
                    text=fragment,
                    car_code=car_code,
                    open_code=open_code,
                    trigger_sentence=parser.raw("trigger_sentence") or None,
                    coder_id=parser.raw("coder_id") or None,
                )
            )

    for row in rejected:
        logger.warning(f"Rejected survey row {row.row}: {row.reason}")

    responses = {
        participant_id: ParticipantRecord(
            profile=profiles[participant_id], questions=tuple(questions[participant_id])
        )
        for participant_id in profiles
    }
    corpus = SurveyCorpus(responses=responses, rejected=tuple(rejected))
    logger.info(
        f"Loaded {len(corpus.questions())} questions from {len(responses)} participants "
        f"({len(rejected)} rows rejected)"
    )
    return corpus


def _check_columns(frame: pd.DataFrame, schema: SurveySchemaConfig) -> None:
    missing = [
        column for column in REQUIRED_COLUMNS if schema.header(column) not in frame.columns
    ]
    if missing:
        raise MissingColumn("survey CSV lacks required columns: " + ", ".join(missing))


def load_label_column(path: Union[str, Path]) -> List[str]:
    """
    Read a single-column label file for the agreement calculation.

    A first cell reading 'label', 'code' or 'car_code' is treated as a header.

    Raises:
        EmptyInput: The file holds no labels
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as error:
        raise EmptyInput(f"label file {path} is empty") from error
    labels = [str(value).strip() for value in frame.iloc[:, 0].tolist()]
    if labels and labels[0].lower() in ("label", "code", "car_code"):
        labels = labels[1:]
    labels = [label for label in labels if label]
    if not labels:
        raise EmptyInput(f"label file {path} holds no labels")
    return labels
