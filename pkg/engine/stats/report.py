"""
Plain-text and CSV tables in the survey-analysis layouts.

Layouts: group counts, regression terms, story rank-sum contrasts,
relational question length and top-k template composition by demographic group.
"""

from enum import Enum
from typing import Any, Dict, List, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict

from models.corpus_models import DemographicGroup
from models.stats_models import GroupSummary, LengthSummary, RankSumRow, RegressionRow
from models.template_models import TemplateProportions
from utils.exceptions import LayoutMismatch

# (threshold, mark), checked in order
SIGNIFICANCE_CODES = ((0.0001, "***"), (0.01, "**"), (0.05, "*"), (0.1, "."))


class Layout(str, Enum):
    GROUP_COUNTS = "group_counts"
    REGRESSION = "regression"
    STORY_CONTRAST = "story_contrast"
    QUESTION_LENGTH = "question_length"
    TEMPLATE_PROPORTIONS = "template_proportions"


class ReportTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    layout: Layout
    text: str
    csv: str


def significance_stars(p: float) -> str:
    """'***' < 0.0001, '**' < 0.01, '*' < 0.05, '.' < 0.1, else ''"""
    for threshold, mark in SIGNIFICANCE_CODES:
        if p < threshold:
            return mark
    return ""


def _p(value: float) -> str:
    return f"{value:.6g}"


def _mean_sd(mean: float, sd: float) -> str:
    return f"{mean:.2f} ({sd:.2f})"


def _group_count_rows(rows: Sequence[GroupSummary]) -> List[Dict[str, Any]]:
    return [
        {
            **row.group,
            "N": row.n,
            "Mean # (SD)": _mean_sd(row.mean, row.sd),
            "Mean Frequency (SD)": (
                _mean_sd(row.frequency_mean, row.frequency_sd)
                if row.frequency_mean is not None
                else ""
            ),
        }
        for row in rows
    ]


def _regression_rows(rows: Sequence[RegressionRow]) -> List[Dict[str, Any]]:
    table = []
    for row in rows:
        estimate = row.result.term(row.term)
        table.append(
            {
                "Factors": row.factors,
                "Outcome": row.outcome,
                "Term": row.term,
                "Coefficient Estimate": f"{estimate['estimate']:.5f}",
                "Coefficient Std. Error": f"{estimate['std_error']:.5f}",
                "Z-value": f"{estimate['z']:.3f}",
                "AIC": f"{row.result.aic:.3f}",
                "2xloglikelihood": f"{row.result.two_loglik:.3f}",
                "p-val": _p(estimate["p"]),
                "": significance_stars(estimate["p"]),
            }
        )
    return table


def _story_contrast_rows(rows: Sequence[RankSumRow]) -> List[Dict[str, Any]]:
    return [
        {
            "Comparison": row.comparison,
            "Outcome": row.outcome,
            "W-value": f"{row.result.w:g}",
            "p-value": _p(row.result.p),
            "": significance_stars(row.result.p),
            "Method": row.result.method.value,
        }
        for row in rows
    ]


def _question_length_rows(rows: Sequence[LengthSummary]) -> List[Dict[str, Any]]:
    return [
        {
            **row.group,
            "N questions": row.n_questions,
            "Mean length of Relational questions": (
                f"{row.mean_length:.2f}" if row.mean_length is not None else "NA"
            ),
        }
        for row in rows
    ]


def _proportion_rows(rows: Sequence[TemplateProportions]) -> List[Dict[str, Any]]:
    return [
        {
            "k": row.k,
            **{
                group.value: f"{row.percentages.get(group, 0.0):.2f}%"
                for group in DemographicGroup
            },
        }
        for row in rows
    ]


_LAYOUTS: Dict[Layout, tuple] = {
    Layout.GROUP_COUNTS: (GroupSummary, _group_count_rows),
    Layout.REGRESSION: (RegressionRow, _regression_rows),
    Layout.STORY_CONTRAST: (RankSumRow, _story_contrast_rows),
    Layout.QUESTION_LENGTH: (LengthSummary, _question_length_rows),
    Layout.TEMPLATE_PROPORTIONS: (TemplateProportions, _proportion_rows),
}


def report_table(results: Sequence[BaseModel], layout: Layout) -> ReportTable:
    """
    Render results in one of the report layouts.

    Args:
        results (Sequence[BaseModel]): Rows of the kind the layout expects
        layout (Layout): Target table layout

    Returns:
        ReportTable: Aligned plain text and CSV

    Raises:
        LayoutMismatch: No rows, or rows of another kind
    """
    layout = Layout(layout)
    expected, build = _LAYOUTS[layout]
    if not results:
        raise LayoutMismatch(f"no rows to render as {layout.value}")
    if not all(isinstance(row, expected) for row in results):
        raise LayoutMismatch(
            f"{layout.value} renders {expected.__name__} rows",
            got=sorted({type(row).__name__ for row in results}),
        )
    frame = pd.DataFrame(build(results))
    return ReportTable(
        layout=layout,
        text=frame.to_string(index=False),
        csv=frame.to_csv(index=False),
    )
