"""
Per-participant aggregation of a survey corpus.

The unit of analysis is a participant, or a (participant, story) pair when
the story is one of the grouping factors or a regression covariate.
"""

from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from models.corpus_models import CarCode, CodedQuestion, OpenCode, Phase, SurveyCorpus
from models.stats_models import CountObservation
from utils.exceptions import UnknownFactor

# Outcome name -> predicate over a question
OUTCOMES: Dict[str, Callable[[CodedQuestion], bool]] = {
    "relational": lambda q: q.car_code == CarCode.RELATIONAL,
    "abstract": lambda q: q.car_code == CarCode.ABSTRACT,
    "concrete": lambda q: q.car_code == CarCode.CONCRETE,
    "open_ended": lambda q: q.open_code == OpenCode.OPEN,
    "total": lambda q: True,
}

FACTORS = (
    "is_caregiver",
    "is_latinx",
    "platform",
    "read_frequency",
    "experience_related_to_story",
    "story",
)
FACTOR_ALIASES = {
    "caregiver": "is_caregiver",
    "latinx": "is_latinx",
    "experience": "experience_related_to_story",
    "experience_related": "experience_related_to_story",
    "frequency": "read_frequency",
}

BEST_FARM = "best_farm"
CELEBRATIONS = "celebrations"


def resolve_factors(grouping: Iterable[str]) -> List[str]:
    """Map aliases to profile field names; raise UnknownFactor otherwise"""
    resolved = []
    for factor in grouping:
        name = FACTOR_ALIASES.get(factor, factor)
        if name not in FACTORS:
            raise UnknownFactor(f"unknown grouping factor {factor!r}")
        resolved.append(name)
    return resolved


def resolve_outcome(outcome: str) -> Callable[[CodedQuestion], bool]:
    if outcome not in OUTCOMES:
        raise UnknownFactor(f"unknown outcome {outcome!r}")
    return OUTCOMES[outcome]


def unit_frame(
    corpus: SurveyCorpus,
    outcome: str,
    by_story: bool,
    phases: Optional[Sequence[Phase]] = None,
) -> pd.DataFrame:
    """
    One row per analysis unit with its profile fields and outcome count.

    Args:
        corpus (SurveyCorpus): Loaded survey
        outcome (str): Key of OUTCOMES
        by_story (bool): Split each participant by the stories they answered
        phases (Sequence[Phase], optional): Phases counted; both when omitted

    Returns:
        pd.DataFrame: participant_id, story (when by_story), profile fields, outcome_count
    """
    predicate = resolve_outcome(outcome)
    counted = set(phases or (Phase.DURING, Phase.AFTER))
    rows = []
    for participant_id, record in corpus.responses.items():
        profile = record.profile.model_dump(mode="json")
        stories = sorted({q.story for q in record.questions}) if by_story else [None]
        for story in stories:
            count = sum(
                1
                for q in record.questions
                if q.phase in counted
                and (story is None or q.story == story)
                and predicate(q)
            )
            row = {"participant_id": participant_id, **profile, "outcome_count": count}
            if by_story:
                row["story"] = story
            rows.append(row)
    columns = ["participant_id", "story", *profile_columns(), "outcome_count"]
    frame = pd.DataFrame(rows, columns=columns)
    if not by_story:
        frame = frame.drop(columns=["story"])
    return frame


def profile_columns() -> List[str]:
    return [
        "is_caregiver",
        "is_latinx",
        "platform",
        "read_frequency",
        "experience_related_to_story",
    ]


def repeated_participants(corpus: SurveyCorpus) -> List[str]:
    """Participants with questions under both named stories, sorted"""
    repeated = []
    for participant_id, record in corpus.responses.items():
        stories = {q.story for q in record.questions}
        if BEST_FARM in stories and CELEBRATIONS in stories:
            repeated.append(participant_id)
    return sorted(repeated)


def story_contrast_counts(
    corpus: SurveyCorpus, outcome: str, phases: Optional[Sequence[Phase]] = None
) -> Tuple[List[int], List[int]]:
    """
    Outcome counts of repeated participants under each story.

    Returns:
        Tuple[List[int], List[int]]: (best_farm counts, celebrations counts),
            both in participant_id order
    """
    repeated = set(repeated_participants(corpus))
    frame = unit_frame(corpus, outcome, by_story=True, phases=phases)
    frame = frame[frame["participant_id"].isin(repeated)].sort_values(
        "participant_id", kind="stable"
    )
    counts = frame.set_index("story")["outcome_count"].astype(int)
    best_farm = counts.loc[counts.index == BEST_FARM].tolist()
    celebrations = counts.loc[counts.index == CELEBRATIONS].tolist()
    return best_farm, celebrations


def count_observations(
    corpus: SurveyCorpus,
    outcome: str,
    phases: Optional[Sequence[Phase]] = None,
    include_repeated: bool = False,
) -> List[CountObservation]:
    """
    Regression input: one observation per (participant, story).

    Participants who answered both stories are left out unless
    include_repeated is set; their story contrast is a paired comparison
    handled by story_contrast_counts.

    Covariates are story (1 for celebrations), latinx, caregiver, experience
    and read_frequency; interaction terms are formed by the design matrix.
    """
    frame = unit_frame(corpus, outcome, by_story=True, phases=phases)
    if not include_repeated:
        frame = frame[~frame["participant_id"].isin(set(repeated_participants(corpus)))]
    observations = []
    for row in frame.itertuples(index=False):
        observations.append(
            CountObservation(
                outcome=int(row.outcome_count),
                covariates={
                    "story": 1.0 if row.story == CELEBRATIONS else 0.0,
                    "latinx": float(row.is_latinx),
                    "caregiver": float(row.is_caregiver),
                    "experience": float(row.experience_related_to_story),
                    "read_frequency": float(row.read_frequency),
                },
            )
        )
    return observations
