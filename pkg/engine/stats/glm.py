"""
Log-link count regression: Poisson and negative binomial (NB2).

The negative binomial variance is mu + mu^2 / theta. Both fits use
iteratively reweighted least squares for the coefficients; the negative
binomial fit alternates it with a Newton step on log(theta).
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.special import digamma, gammaln, polygamma, xlogy
from scipy.stats import norm

from models.config_models import Tolerances
from models.stats_models import CountObservation, Family, RegressionResult
from utils.exceptions import EmptySample, NonConvergence, RankDeficientDesign, UnknownFactor

INTERCEPT = "(Intercept)"
THETA_CAP = 1e6
POISSON_TOL = 1e-8
POISSON_MAX_ITER = 50
MAX_HALVINGS = 30
LOG_THETA_STEP = 5.0
P_FLOOR = float(np.finfo(float).tiny)


def design_matrix(
    observations: Sequence[CountObservation], terms: Sequence[str]
) -> Tuple[np.ndarray, List[str]]:
    """
    Build the design matrix, intercept first.

    Args:
        observations (Sequence[CountObservation]): Rows
        terms (Sequence[str]): Covariate names; "a:b" is the product of a and b

    Returns:
        Tuple[np.ndarray, List[str]]: n x p matrix and its column names

    Raises:
        EmptySample: No observations
        UnknownFactor: A term names a covariate an observation lacks
        RankDeficientDesign: Columns are linearly dependent
    """
    if not observations:
        raise EmptySample("no observations to fit")
    names = [INTERCEPT] + list(terms)
    columns = [np.ones(len(observations))]
    for term in terms:
        column = np.ones(len(observations))
        for factor in term.split(":"):
            try:
                column = column * np.array(
                    [obs.covariates[factor] for obs in observations], dtype=float
                )
            except KeyError as error:
                raise UnknownFactor(f"unknown covariate {factor!r}", term=term) from error
        columns.append(column)
    X = np.column_stack(columns)
    if X.shape[0] < X.shape[1] or np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficientDesign("design matrix is not full column rank", terms=names)
    return X, names


def _outcomes(observations: Sequence[CountObservation]) -> np.ndarray:
    return np.array([obs.outcome for obs in observations], dtype=float)


def _wls(X: np.ndarray, weights: np.ndarray, z: np.ndarray) -> np.ndarray:
    root = np.sqrt(weights)
    beta, *_ = np.linalg.lstsq(X * root[:, None], z * root, rcond=None)
    return beta


def _mu(X: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return np.exp(np.clip(X @ beta, -700.0, 700.0))


def poisson_loglik(y: np.ndarray, mu: np.ndarray) -> float:
    return float(np.sum(xlogy(y, mu) - mu - gammaln(y + 1.0)))


def negbin_loglik(y: np.ndarray, mu: np.ndarray, theta: float) -> float:
    return float(
        np.sum(
            gammaln(y + theta)
            - gammaln(theta)
            - gammaln(y + 1.0)
            - theta * np.log1p(mu / theta)
            + xlogy(y, mu)
            - xlogy(y, theta + mu)
        )
    )


def _result(
    family: Family,
    names: List[str],
    beta: np.ndarray,
    se: np.ndarray,
    log_likelihood: float,
    n_params: int,
    theta: float,
    iterations: int,
    n_obs: int,
    underdispersed: bool = False,
    trace: Optional[List[float]] = None,
) -> RegressionResult:
    coefficients = [float(b) for b in beta]
    std_errors = [float(s) for s in se]
    z_values = [b / s for b, s in zip(coefficients, std_errors)]
    # two-sided normal tail, floored at the smallest positive double
    p_values = [max(float(2.0 * norm.sf(abs(z))), P_FLOOR) for z in z_values]
    log_likelihood = float(log_likelihood)
    return RegressionResult(
        family=family,
        terms=names,
        coefficients=coefficients,
        std_errors=std_errors,
        z_values=z_values,
        p_values=p_values,
        log_likelihood=log_likelihood,
        aic=-2.0 * log_likelihood + 2.0 * n_params,
        n_params=n_params,
        theta=theta,
        converged=True,
        iterations=iterations,
        n_obs=n_obs,
        underdispersed=underdispersed,
        loglik_trace=trace or [],
    )


def _poisson_irls(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, int]:
    mu = y + 0.1
    eta = np.log(mu)
    beta = None
    for iteration in range(1, POISSON_MAX_ITER + 1):
        z = eta + (y - mu) / mu
        beta_new = _wls(X, mu, z)
        if not np.all(np.isfinite(beta_new)):
            break
        eta = X @ beta_new
        mu = _mu(X, beta_new)
        if beta is not None and np.max(np.abs(beta_new - beta)) < POISSON_TOL:
            return beta_new, iteration
        beta = beta_new
    raise NonConvergence(
        f"Poisson IRLS did not converge in {POISSON_MAX_ITER} iterations"
    )


def fit_poisson(
    observations: Sequence[CountObservation], terms: Sequence[str] = ()
) -> RegressionResult:
    """
    Poisson regression with log link by IRLS.

    Args:
        observations (Sequence[CountObservation]): Count rows
        terms (Sequence[str]): Covariates (intercept added)

    Returns:
        RegressionResult: theta is reported as +inf

    Raises:
        RankDeficientDesign: Design not full rank
        NonConvergence: No convergence within 50 iterations
    """
    X, names = design_matrix(observations, terms)
    y = _outcomes(observations)
    beta, iterations = _poisson_irls(X, y)
    mu = _mu(X, beta)
    covariance = np.linalg.inv(X.T @ (X * mu[:, None]))
    se = np.sqrt(np.diag(covariance))
    return _result(
        Family.POISSON,
        names,
        beta,
        se,
        poisson_loglik(y, mu),
        n_params=X.shape[1],
        theta=math.inf,
        iterations=iterations,
        n_obs=len(y),
    )


def _theta_moments(y: np.ndarray, mu: np.ndarray) -> float:
    excess = np.sum((y - mu) ** 2 - mu)
    if excess <= 0:
        return THETA_CAP
    return float(min(max(np.sum(mu**2) / excess, 1e-8), THETA_CAP))


def _theta_derivatives(y: np.ndarray, mu: np.ndarray, theta: float) -> Tuple[float, float]:
    """dl/dtheta and d2l/dtheta2"""
    total = theta + mu
    gradient = np.sum(
        digamma(y + theta) - digamma(theta) - np.log1p(mu / theta) + (mu - y) / total
    )
    hessian = np.sum(
        polygamma(1, y + theta)
        - polygamma(1, theta)
        + 1.0 / theta
        - 2.0 / total
        + (y + theta) / total**2
    )
    return float(gradient), float(hessian)


def _beta_step(
    X: np.ndarray, y: np.ndarray, beta: np.ndarray, theta: float, tol: float
) -> np.ndarray:
    """IRLS for beta at fixed theta, with step-halving"""
    current = negbin_loglik(y, _mu(X, beta), theta)
    for _ in range(POISSON_MAX_ITER):
        mu = _mu(X, beta)
        z = X @ beta + (y - mu) / mu
        candidate = _wls(X, mu / (1.0 + mu / theta), z)
        value = negbin_loglik(y, _mu(X, candidate), theta)
        halvings = 0
        while not value >= current and halvings < MAX_HALVINGS:
            candidate = (beta + candidate) / 2.0
            value = negbin_loglik(y, _mu(X, candidate), theta)
            halvings += 1
        if not value >= current:
            break
        step = np.max(np.abs(candidate - beta))
        beta, current = candidate, value
        if step < tol:
            break
    return beta


def _theta_step(y: np.ndarray, mu: np.ndarray, theta: float) -> float:
    """Newton step on log(theta) with step-halving, capped at THETA_CAP"""
    gradient, hessian = _theta_derivatives(y, mu, theta)
    if theta >= THETA_CAP and gradient >= 0:
        return THETA_CAP
    # derivatives in phi = log(theta)
    grad_phi = theta * gradient
    hess_phi = theta**2 * hessian + theta * gradient
    if hess_phi < 0:
        step = -grad_phi / hess_phi
    else:
        step = math.copysign(1.0, grad_phi) if grad_phi else 0.0
    step = float(np.clip(step, -LOG_THETA_STEP, LOG_THETA_STEP))

    phi = math.log(theta)
    current = negbin_loglik(y, mu, theta)
    for _ in range(MAX_HALVINGS):
        candidate = math.exp(min(phi + step, math.log(THETA_CAP)))
        if negbin_loglik(y, mu, candidate) >= current:
            return candidate
        step /= 2.0
    return theta


def _standard_errors(
    X: np.ndarray, y: np.ndarray, mu: np.ndarray, theta: float, at_cap: bool
) -> np.ndarray:
    """Observed-information standard errors of beta"""
    total = theta + mu
    w = mu * theta * (theta + y) / total**2
    info_beta = X.T @ (X * w[:, None])
    fallback = np.sqrt(np.diag(np.linalg.inv(info_beta)))
    if at_cap:
        return fallback

    _, hessian_theta = _theta_derivatives(y, mu, theta)
    cross = -(X.T @ ((y - mu) * mu / total**2))
    p = X.shape[1]
    info = np.zeros((p + 1, p + 1))
    info[:p, :p] = info_beta
    info[:p, p] = cross
    info[p, :p] = cross
    info[p, p] = -hessian_theta
    try:
        variances = np.diag(np.linalg.inv(info))[:p]
    except np.linalg.LinAlgError:
        return fallback
    if not np.all(np.isfinite(variances)) or np.any(variances <= 0):
        return fallback
    return np.sqrt(variances)


def fit_negbin(
    observations: Sequence[CountObservation],
    terms: Sequence[str] = (),
    tolerances: Optional[Tolerances] = None,
) -> RegressionResult:
    """
    Negative binomial regression with dispersion estimation.

    Starts from the Poisson fit and a method-of-moments theta, then
    alternates IRLS on beta and a Newton step on log(theta) until the
    log-likelihood changes by less than glm_tol. A theta at the 1e6 cap is
    reported as underdispersed (a Poisson-equivalent fit).

    Args:
        observations (Sequence[CountObservation]): Count rows
        terms (Sequence[str]): Covariates (intercept added)
        tolerances (Tolerances, optional): glm_tol and max_iter

    Returns:
        RegressionResult: Fit with aic counting theta as a parameter

    Raises:
        RankDeficientDesign: Design not full rank
        NonConvergence: No convergence within max_iter outer iterations
    """
    tolerances = tolerances or Tolerances()
    X, names = design_matrix(observations, terms)
    y = _outcomes(observations)
    beta, _ = _poisson_irls(X, y)
    theta = _theta_moments(y, _mu(X, beta))

    log_likelihood = negbin_loglik(y, _mu(X, beta), theta)
    trace = [log_likelihood]
    for iteration in range(1, tolerances.max_iter + 1):
        beta = _beta_step(X, y, beta, theta, tolerances.glm_tol)
        theta = _theta_step(y, _mu(X, beta), theta)
        updated = negbin_loglik(y, _mu(X, beta), theta)
        trace.append(updated)
        if abs(updated - log_likelihood) < tolerances.glm_tol:
            log_likelihood = updated
            break
        log_likelihood = updated
    else:
        raise NonConvergence(
            f"negative binomial fit did not converge in {tolerances.max_iter} iterations",
            theta=theta,
        )

    at_cap = theta >= THETA_CAP
    if at_cap:
        logger.debug("theta reached the cap; reporting a Poisson-equivalent fit")
    mu = _mu(X, beta)
    return _result(
        Family.NEGATIVE_BINOMIAL,
        names,
        beta,
        _standard_errors(X, y, mu, theta, at_cap),
        log_likelihood,
        n_params=X.shape[1] + 1,
        theta=float(theta),
        iterations=iteration,
        n_obs=len(y),
        underdispersed=at_cap,
        trace=trace,
    )
