from typing import Dict, List, Optional, Sequence

from loguru import logger

from engine.corpus.aggregates import (
    BEST_FARM,
    CELEBRATIONS,
    count_observations,
    story_contrast_counts,
)
from engine.stats.glm import fit_negbin
from engine.stats.rank_sum import wilcoxon_rank_sum
from models.config_models import Tolerances
from models.corpus_models import Phase, SurveyCorpus
from models.stats_models import RankSumRow, RegressionRow, Sides
from utils.exceptions import EmptySample, NonConvergence, RankDeficientDesign

REGRESSION_OUTCOMES = ("relational", "abstract", "open_ended")

# label -> model terms; the last term is the one reported
FACTOR_SETS: Dict[str, List[str]] = {
    "Story": ["story"],
    "Story & Latinx": ["story", "latinx", "story:latinx"],
    "Story & caregivers": ["story", "caregiver", "story:caregiver"],
    "Story & experience": ["story", "experience", "story:experience"],
}


def regression_battery(
    corpus: SurveyCorpus,
    outcomes: Sequence[str] = REGRESSION_OUTCOMES,
    factor_sets: Optional[Dict[str, List[str]]] = None,
    tolerances: Optional[Tolerances] = None,
    phases: Optional[Sequence[Phase]] = None,
) -> List[RegressionRow]:
    """
    Fit a negative binomial model per (factor set, outcome).

    Models that cannot be fitted (rank-deficient design, no convergence)
    are logged and left out.

    Returns:
        List[RegressionRow]: One row per fitted model, reporting its last term
    """
    factor_sets = factor_sets or FACTOR_SETS
    rows = []
    for outcome in outcomes:
        observations = count_observations(corpus, outcome, phases=phases)
        for label, terms in factor_sets.items():
            try:
                result = fit_negbin(observations, terms, tolerances)
            except (RankDeficientDesign, NonConvergence, EmptySample) as error:
                logger.warning(f"Skipping {label} model for {outcome}: {error}")
                continue
            rows.append(
                RegressionRow(factors=label, outcome=outcome, term=terms[-1], result=result)
            )
    return rows


def story_contrast(
    corpus: SurveyCorpus,
    outcomes: Sequence[str] = REGRESSION_OUTCOMES,
    sides: Sides = Sides.TWO_SIDED,
    phases: Optional[Sequence[Phase]] = None,
) -> List[RankSumRow]:
    """Rank-sum test of each outcome between the two stories, over repeated participants"""
    rows = []
    for outcome in outcomes:
        best_farm, celebrations = story_contrast_counts(corpus, outcome, phases=phases)
        try:
            result = wilcoxon_rank_sum(best_farm, celebrations, sides)
        except EmptySample as error:
            logger.warning(f"Skipping story contrast for {outcome}: {error}")
            continue
        rows.append(
            RankSumRow(
                comparison=f"{BEST_FARM} vs {CELEBRATIONS}", outcome=outcome, result=result
            )
        )
    return rows
