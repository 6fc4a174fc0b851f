"""
Corpus

Survey-response ingestion, inter-rater agreement and descriptive group
statistics over coded caregiver questions.
"""

from engine.corpus.agreement import AgreementResult, agreement, cohen_kappa
from engine.corpus.aggregates import (
    count_observations,
    repeated_participants,
    story_contrast_counts,
)
from engine.corpus.bundle import build_bundle, load_bundle, save_bundle
from engine.corpus.descriptive import descriptive_counts, mean_question_length
from engine.corpus.survey_loader import (
    SurveySchemaConfig,
    load_label_column,
    load_survey_csv,
    split_questions,
)

__all__ = [
    "load_survey_csv",
    "load_label_column",
    "split_questions",
    "SurveySchemaConfig",
    "cohen_kappa",
    "agreement",
    "AgreementResult",
    "descriptive_counts",
    "mean_question_length",
    "count_observations",
    "repeated_participants",
    "story_contrast_counts",
    "build_bundle",
    "save_bundle",
    "load_bundle",
]
