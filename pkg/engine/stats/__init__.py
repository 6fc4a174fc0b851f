"""
Stats

Count regression (Poisson, negative binomial), the Wilcoxon rank-sum test,
report identities and table rendering.
"""

from engine.stats.battery import FACTOR_SETS, regression_battery, story_contrast
from engine.stats.glm import design_matrix, fit_negbin, fit_poisson
from engine.stats.identities import aic_consistent, result_consistent, wald_z_consistent
from engine.stats.rank_sum import wilcoxon_rank_sum
from engine.stats.report import Layout, ReportTable, report_table, significance_stars

__all__ = [
    "design_matrix",
    "fit_poisson",
    "fit_negbin",
    "wilcoxon_rank_sum",
    "wald_z_consistent",
    "aic_consistent",
    "result_consistent",
    "significance_stars",
    "report_table",
    "Layout",
    "ReportTable",
    "regression_battery",
    "story_contrast",
    "FACTOR_SETS",
]
