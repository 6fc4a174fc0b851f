import itertools
import math

import numpy as np
import pytest

from engine.corpus import descriptive_counts, mean_question_length
from engine.stats import (
    FACTOR_SETS,
    Layout,
    aic_consistent,
    design_matrix,
    fit_negbin,
    fit_poisson,
    regression_battery,
    report_table,
    result_consistent,
    significance_stars,
    story_contrast,
    wald_z_consistent,
    wilcoxon_rank_sum,
)
from engine.stats.glm import P_FLOOR, THETA_CAP, _result, negbin_loglik
from engine.templates import proportions_at
from models.stats_models import (
    CountObservation,
    Family,
    RankSumMethod,
    RegressionRow,
    Sides,
)
from utils.exceptions import (
    EmptySample,
    LayoutMismatch,
    RankDeficientDesign,
    UnknownFactor,
)


def _observations(outcomes, xs):
    return [
        CountObservation(outcome=y, covariates={"x": float(x)}) for y, x in zip(outcomes, xs)
    ]


@pytest.fixture(scope="module")
def two_groups():
    # means 3 and 6
    return _observations([2, 3, 4, 5, 6, 7], [0, 0, 0, 1, 1, 1])


@pytest.fixture(scope="module")
def simulated():
    rng = np.random.default_rng(20240611)
    x = rng.integers(0, 2, size=2000)
    mu = np.exp(0.5 + 0.7 * x)
    theta = 2.0
    y = rng.negative_binomial(theta, theta / (theta + mu))
    return _observations(y.tolist(), x.tolist())


def test_poisson_two_groups(two_groups):
    result = fit_poisson(two_groups, ["x"])
    assert result.family == Family.POISSON
    assert result.terms == ["(Intercept)", "x"]
    assert result.coefficients[0] == pytest.approx(math.log(3), abs=1e-6)
    assert result.coefficients[1] == pytest.approx(math.log(2), abs=1e-6)
    assert result.std_errors[0] == pytest.approx(1 / 3, abs=1e-6)
    assert result.std_errors[1] == pytest.approx(math.sqrt(1 / 9 + 1 / 18), abs=1e-6)
    assert math.isinf(result.theta)
    assert result.n_params == 2
    assert result_consistent(result)


def test_poisson_intercept_only():
    result = fit_poisson(_observations([3] * 8, [0] * 8))
    assert result.terms == ["(Intercept)"]
    assert result.coefficients[0] == pytest.approx(math.log(3), abs=1e-6)
    assert result.coefficients[0] == pytest.approx(1.098612, abs=1e-6)


def test_p_values_stay_positive_for_huge_z():
    result = _result(
        Family.POISSON,
        ["(Intercept)", "x"],
        np.array([50.0, 0.0]),
        np.array([0.01, 1.0]),
        log_likelihood=-1.0,
        n_params=2,
        theta=math.inf,
        iterations=1,
        n_obs=10,
    )
    assert result.p_values[0] == P_FLOOR
    assert 0.0 < result.p_values[0] <= 1.0
    assert result.p_values[1] == pytest.approx(1.0)


def test_design_matrix_interactions():
    observations = [
        CountObservation(outcome=1, covariates={"a": a, "b": b})
        for a, b in [(0, 0), (0, 1), (1, 0), (1, 1), (1, 1)]
    ]
    X, names = design_matrix(observations, ["a", "b", "a:b"])
    assert names == ["(Intercept)", "a", "b", "a:b"]
    assert X[:, 3].tolist() == [0.0, 0.0, 0.0, 1.0, 1.0]


def test_design_matrix_errors(two_groups):
    duplicated = [
        CountObservation(
            outcome=o.outcome,
            covariates={"x": o.covariates["x"], "z": o.covariates["x"]},
        )
        for o in two_groups
    ]
    with pytest.raises(RankDeficientDesign):
        fit_poisson(duplicated, ["x", "z"])
    with pytest.raises(UnknownFactor):
        fit_poisson(two_groups, ["missing"])
    with pytest.raises(EmptySample):
        fit_negbin([], ["x"])


def test_negbin_underdispersed_hits_cap():
    observations = _observations([5] * 10, [0] * 10)
    result = fit_negbin(observations)
    assert result.underdispersed
    assert result.theta == THETA_CAP
    assert result.coefficients[0] == pytest.approx(math.log(5), abs=1e-6)
    assert result.std_errors[0] == pytest.approx(1 / math.sqrt(50), rel=1e-3)
    assert result.n_params == 2


def test_negbin_approaches_poisson_at_cap(two_groups):
    poisson = fit_poisson(two_groups, ["x"])
    negbin = fit_negbin(two_groups, ["x"])
    assert negbin.underdispersed
    assert negbin.coefficients == pytest.approx(poisson.coefficients, abs=1e-5)
    assert negbin.log_likelihood == pytest.approx(poisson.log_likelihood, abs=1e-3)
    assert negbin.aic == pytest.approx(poisson.aic + 2.0, abs=1e-2)


def test_negbin_matches_poisson_on_equidispersed_counts():
    # Poisson(2) frequencies scaled to 199 rows: variance 1.9597 against mean 1.98995
    frequencies = {0: 27, 1: 54, 2: 54, 3: 36, 4: 18, 5: 7, 6: 2, 7: 1}
    base = [value for value, count in frequencies.items() for _ in range(count)]
    outcomes = base + [value + 1 for value in base]
    xs = [0] * len(base) + [1] * len(base)
    poisson = fit_poisson(_observations(outcomes, xs), ["x"])
    negbin = fit_negbin(_observations(outcomes, xs), ["x"])
    assert negbin.theta > 1e4
    for nb_coef, poisson_coef in zip(negbin.coefficients, poisson.coefficients):
        assert abs(nb_coef - poisson_coef) < 1e-4


def test_negbin_recovers_simulated_parameters(simulated):
    result = fit_negbin(simulated, ["x"])
    assert not result.underdispersed
    assert result.coefficients[0] == pytest.approx(0.5, abs=0.1)
    assert result.coefficients[1] == pytest.approx(0.7, abs=0.1)
    assert result.theta == pytest.approx(2.0, abs=0.4)
    assert result_consistent(result)


def test_negbin_matches_grid_search(simulated):
    result = fit_negbin(simulated, ["x"])
    X, _ = design_matrix(simulated, ["x"])
    y = np.array([o.outcome for o in simulated], dtype=float)
    intercepts = np.arange(0.30, 0.70 + 1e-9, 0.02)
    slopes = np.arange(0.50, 0.90 + 1e-9, 0.02)
    thetas = np.arange(1.4, 2.8 + 1e-9, 0.1)

    best, argbest = -np.inf, None
    for b0, b1, theta in itertools.product(intercepts, slopes, thetas):
        value = negbin_loglik(y, np.exp(X @ np.array([b0, b1])), theta)
        if value > best:
            best, argbest = value, (b0, b1, theta)

    assert best <= result.log_likelihood + 1e-6
    assert argbest[0] == pytest.approx(result.coefficients[0], abs=0.03)
    assert argbest[1] == pytest.approx(result.coefficients[1], abs=0.03)
    assert argbest[2] == pytest.approx(result.theta, abs=0.15)


def test_negbin_is_a_local_maximum(simulated):
    result = fit_negbin(simulated, ["x"])
    X, _ = design_matrix(simulated, ["x"])
    y = np.array([o.outcome for o in simulated], dtype=float)
    beta = np.array(result.coefficients)
    best = negbin_loglik(y, np.exp(X @ beta), result.theta)
    assert best == pytest.approx(result.log_likelihood, abs=1e-6)
    steps = (-0.01, 0.0, 0.01)
    for d0, d1, scale in itertools.product(steps, steps, (0.9, 1.0, 1.1)):
        moved = beta + np.array([d0, d1])
        assert negbin_loglik(y, np.exp(X @ moved), result.theta * scale) <= best + 1e-6


def test_negbin_trace_never_decreases(simulated):
    trace = fit_negbin(simulated, ["x"]).loglik_trace
    assert len(trace) >= 2
    assert all(after >= before - 1e-9 for before, after in zip(trace, trace[1:]))


def test_rank_sum_exact():
    result = wilcoxon_rank_sum([1, 2, 3], [4, 5, 6])
    assert result.w == 0
    assert result.p == pytest.approx(0.1)
    assert result.method == RankSumMethod.EXACT


def _exact_null(x, y):
    pooled = sorted(x + y)
    ranks = {value: rank for rank, value in enumerate(pooled, start=1)}
    n1 = len(x)
    offset = n1 * (n1 + 1) / 2
    observed = sum(ranks[value] for value in x) - offset
    null = [sum(c) - offset for c in itertools.combinations(range(1, len(pooled) + 1), n1)]
    less = sum(u <= observed for u in null) / len(null)
    greater = sum(u >= observed for u in null) / len(null)
    return observed, less, greater


def test_rank_sum_matches_enumeration():
    x = [1.5, 4.2, 7.1]
    y = [2.3, 3.3, 5.9, 8.8]
    observed, less, greater = _exact_null(x, y)
    assert observed == 5
    assert wilcoxon_rank_sum(x, y, Sides.LESS).p == pytest.approx(less)
    assert wilcoxon_rank_sum(x, y, Sides.GREATER).p == pytest.approx(greater)
    two_sided = wilcoxon_rank_sum(x, y)
    assert two_sided.w == observed
    assert two_sided.p == pytest.approx(min(1.0, 2 * min(less, greater)))


def test_rank_sum_smallest_exact_case():
    result = wilcoxon_rank_sum([1, 2], [3, 4])
    assert result.w == 0
    assert result.p == pytest.approx(1 / 3, abs=1e-6)
    assert result.method == RankSumMethod.EXACT


@pytest.mark.parametrize("n1", range(1, 7))
@pytest.mark.parametrize("n2", range(1, 7))
def test_rank_sum_sweep_matches_enumeration(n1, n2):
    rng = np.random.default_rng(1000 * n1 + n2)
    for _ in range(5):
        values = rng.permutation(100)[: n1 + n2].tolist()
        x, y = values[:n1], values[n1:]
        observed, less, greater = _exact_null(x, y)
        two_sided = wilcoxon_rank_sum(x, y)
        assert two_sided.method == RankSumMethod.EXACT
        assert two_sided.w == observed
        assert two_sided.p == pytest.approx(min(1.0, 2 * min(less, greater)), abs=1e-12)
        assert wilcoxon_rank_sum(x, y, Sides.LESS).p == pytest.approx(less, abs=1e-12)
        assert wilcoxon_rank_sum(x, y, Sides.GREATER).p == pytest.approx(greater, abs=1e-12)


def test_rank_sum_approximation():
    tied = wilcoxon_rank_sum([1, 2, 2], [2, 3, 4])
    assert tied.method == RankSumMethod.NORMAL_APPROX
    large = wilcoxon_rank_sum(list(range(15)), list(range(100, 110)))
    assert large.method == RankSumMethod.NORMAL_APPROX
    assert large.w == 0
    assert large.p < 0.001
    with pytest.raises(EmptySample):
        wilcoxon_rank_sum([], [1, 2])


@pytest.mark.parametrize(
    "p, stars",
    [(0.00005, "***"), (0.005, "**"), (0.03, "*"), (0.07, "."), (0.5, "")],
)
def test_significance_stars(p, stars):
    assert significance_stars(p) == stars


def test_reported_identities():
    assert wald_z_consistent(0.66647, 0.18201, 3.662)
    assert not wald_z_consistent(0.66647, 0.18201, 3.9)
    assert aic_consistent(-346.7375, 3, 699.475)
    assert not aic_consistent(-346.7375, 3, 705.0)


def test_regression_battery(mixed_corpus):
    rows = regression_battery(mixed_corpus, outcomes=["total"])
    assert [row.factors for row in rows] == list(FACTOR_SETS)
    for row in rows:
        assert row.term == FACTOR_SETS[row.factors][-1]
        assert row.result.family == Family.NEGATIVE_BINOMIAL
        assert row.result.n_obs == 16
        assert result_consistent(row.result)


def test_regression_battery_without_one_survey_participants(survey_corpus):
    assert regression_battery(survey_corpus, outcomes=["total"]) == []


def test_story_contrast(survey_corpus):
    rows = story_contrast(survey_corpus, outcomes=["total"])
    assert len(rows) == 1
    assert rows[0].comparison == "best_farm vs celebrations"
    assert rows[0].result.n1 == rows[0].result.n2 == 12
    assert rows[0].result.method == RankSumMethod.NORMAL_APPROX


def test_report_table_layouts(survey_corpus, ranked, two_groups):
    summaries = descriptive_counts(survey_corpus, ["caregiver"], "relational")
    count_table = report_table(summaries, Layout.GROUP_COUNTS)
    assert count_table.csv.splitlines()[0] == "is_caregiver,N,Mean # (SD),Mean Frequency (SD)"
    assert "1.33 (0.52)" in count_table.text

    row = RegressionRow(
        factors="Story", outcome="total", term="x", result=fit_poisson(two_groups, ["x"])
    )
    regression_table = report_table([row], Layout.REGRESSION)
    header = regression_table.csv.splitlines()[0].split(",")
    assert header[3:9] == [
        "Coefficient Estimate",
        "Coefficient Std. Error",
        "Z-value",
        "AIC",
        "2xloglikelihood",
        "p-val",
    ]

    contrasts = story_contrast(survey_corpus, outcomes=["total"])
    contrast_table = report_table(contrasts, Layout.STORY_CONTRAST)
    assert "best_farm vs celebrations" in contrast_table.text

    lengths = mean_question_length(survey_corpus, ["latinx"])
    length_table = report_table(lengths, Layout.QUESTION_LENGTH)
    assert "Mean length of Relational questions" in length_table.csv

    proportion_table = report_table([proportions_at(ranked, 5)], Layout.TEMPLATE_PROPORTIONS)
    assert proportion_table.csv.splitlines()[0].startswith("k,latinx_caregiver")


def test_report_table_mismatch(survey_corpus):
    with pytest.raises(LayoutMismatch):
        report_table([], Layout.GROUP_COUNTS)
    with pytest.raises(LayoutMismatch):
        report_table(descriptive_counts(survey_corpus, [], "total"), Layout.REGRESSION)
