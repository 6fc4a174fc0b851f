from typing import Sequence

import numpy as np
from scipy.stats import mannwhitneyu

from models.stats_models import RankSumMethod, RankSumResult, Sides
from utils.exceptions import EmptySample

EXACT_MAX_TOTAL = 20


def wilcoxon_rank_sum(
    x: Sequence[float], y: Sequence[float], sides: Sides = Sides.TWO_SIDED
) -> RankSumResult:
    """
    Wilcoxon rank-sum (Mann-Whitney) test of x against y.

    W is the rank sum of x under midranks minus n1(n1+1)/2. The p-value is
    exact when n1 + n2 <= 20 and there are no ties; otherwise it uses the
    normal approximation with tie-corrected variance and a 0.5 continuity
    correction.

    Args:
        x (Sequence[float]): First sample
        y (Sequence[float]): Second sample
        sides (Sides): Alternative hypothesis

    Returns:
        RankSumResult: W, p and the method used

    Raises:
        EmptySample: Either sample is empty
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise EmptySample("both samples must be non-empty", n1=x.size, n2=y.size)

    pooled = np.concatenate([x, y])
    has_ties = np.unique(pooled).size < pooled.size
    if pooled.size <= EXACT_MAX_TOTAL and not has_ties:
        method = RankSumMethod.EXACT
        test = mannwhitneyu(x, y, alternative=sides.value, method="exact")
    else:
        method = RankSumMethod.NORMAL_APPROX
        test = mannwhitneyu(
            x, y, alternative=sides.value, method="asymptotic", use_continuity=True
        )
    return RankSumResult(
        w=float(test.statistic),
        p=float(min(test.pvalue, 1.0)),
        method=method,
        n1=int(x.size),
        n2=int(y.size),
        sides=sides,
    )
