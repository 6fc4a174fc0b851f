from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from engine.corpus.aggregates import resolve_factors, unit_frame
from models.corpus_models import CarCode, Phase, SurveyCorpus
from models.stats_models import GroupSummary, LengthSummary


def _label(value: Any) -> str:
    """Render a group value the way the report tables print it"""
    if isinstance(value, bool):
        return "Yes" if value else "No"
    return str(value)


def _ordered(frame: pd.DataFrame, factors: List[str]) -> pd.DataFrame:
    # Yes before No for boolean factors, natural order otherwise
    ascending = [frame[factor].dtype != bool for factor in factors]
    return frame.sort_values(factors, ascending=ascending, kind="stable")


def descriptive_counts(
    corpus: SurveyCorpus,
    grouping: Sequence[str],
    outcome: str,
    phases: Optional[Sequence[Phase]] = None,
) -> List[GroupSummary]:
    """
    Mean and sample SD of per-participant outcome counts per group.

    Args:
        corpus (SurveyCorpus): Loaded survey
        grouping (Sequence[str]): Profile fields and/or "story"
        outcome (str): relational, abstract, open_ended, concrete or total
        phases (Sequence[Phase], optional): Phases counted; both when omitted

    Returns:
        List[GroupSummary]: One row per non-empty group, with the group's mean
            reading frequency alongside

    Raises:
        UnknownFactor: A grouping factor or the outcome is not recognised
    """
    factors = resolve_factors(grouping)
    frame = unit_frame(corpus, outcome, by_story="story" in factors, phases=phases)
    if frame.empty:
        return []
    if not factors:
        frame = frame.assign(all="all")
        factors = ["all"]

    summaries = []
    grouped = _ordered(frame, factors).groupby(factors, sort=False)
    for key, group in grouped:
        values = key if isinstance(key, tuple) else (key,)
        n = len(group)
        sd = float(group["outcome_count"].std(ddof=1)) if n > 1 else 0.0
        frequency_sd = float(group["read_frequency"].std(ddof=1)) if n > 1 else 0.0
        summaries.append(
            GroupSummary(
                group={factor: _label(value) for factor, value in zip(factors, values)},
                n=n,
                mean=float(group["outcome_count"].mean()),
                sd=sd,
                n_lt_2=n < 2,
                frequency_mean=float(group["read_frequency"].mean()),
                frequency_sd=frequency_sd,
            )
        )
    return summaries


def mean_question_length(
    corpus: SurveyCorpus,
    grouping: Sequence[str],
    car_code: CarCode = CarCode.RELATIONAL,
    phases: Optional[Sequence[Phase]] = None,
) -> List[LengthSummary]:
    """
    Mean whitespace-token length of one CAR type's questions per group.

    Groups whose participants asked no such question report mean_length None.
    """
    factors = resolve_factors(grouping)
    counted = set(phases or (Phase.DURING, Phase.AFTER))
    units = unit_frame(corpus, "total", by_story="story" in factors, phases=phases)
    if units.empty:
        return []

    rows: List[Dict[str, Any]] = []
    for participant_id, record in corpus.responses.items():
        profile = record.profile.model_dump(mode="json")
        for question in record.questions:
            if question.phase in counted and question.car_code == car_code:
                rows.append(
                    {
                        **profile,
                        "story": question.story,
                        "length": len(question.text.split()),
                    }
                )
    lengths = pd.DataFrame(rows, columns=[*units.columns, "length"])

    if not factors:
        units = units.assign(all="all")
        lengths = lengths.assign(all="all")
        factors = ["all"]

    summaries = []
    for key, _ in _ordered(units, factors).groupby(factors, sort=False):
        values = key if isinstance(key, tuple) else (key,)
        mask = pd.Series(True, index=lengths.index)
        for factor, value in zip(factors, values):
            mask &= lengths[factor] == value
        selected = lengths.loc[mask, "length"]
        summaries.append(
            LengthSummary(
                group={factor: _label(value) for factor, value in zip(factors, values)},
                n_questions=int(selected.size),
                mean_length=float(selected.mean()) if selected.size else None,
            )
        )
    return summaries
