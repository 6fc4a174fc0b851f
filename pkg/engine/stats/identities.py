import math

from models.stats_models import RegressionResult

# Reported tables carry about five significant digits
REPORT_RTOL = 1e-3


def wald_z_consistent(
    estimate: float, std_error: float, z: float, rel_tol: float = REPORT_RTOL
) -> bool:
    """Whether a reported z agrees with estimate / std_error"""
    return std_error > 0 and math.isclose(estimate / std_error, z, rel_tol=rel_tol)


def aic_consistent(
    log_likelihood: float, n_params: int, aic: float, abs_tol: float = 1e-2
) -> bool:
    """Whether a reported AIC agrees with -2 loglik + 2k"""
    return math.isclose(-2.0 * log_likelihood + 2.0 * n_params, aic, abs_tol=abs_tol)


def result_consistent(result: RegressionResult) -> bool:
    """Exact identity check of a fitted result"""
    return all(
        z == beta / se
        for beta, se, z in zip(result.coefficients, result.std_errors, result.z_values)
    ) and result.aic == -2.0 * result.log_likelihood + 2.0 * result.n_params
