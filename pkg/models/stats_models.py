from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CountObservation(BaseModel):
    """
    One count outcome with its covariates.

    Attributes:
        outcome (int): Non-negative question count
        covariates (Dict[str, float]): Named binary/ordinal factors; the
            intercept is added by the design matrix builder
    """

    model_config = ConfigDict(frozen=True)

    outcome: int = Field(ge=0)
    covariates: Dict[str, float] = Field(default_factory=dict)


class Family(str, Enum):
    POISSON = "poisson"
    NEGATIVE_BINOMIAL = "negative_binomial"


class RegressionResult(BaseModel):
    """
    A fitted log-link count model.

    theta is the negative binomial dispersion (variance = mu + mu^2 / theta);
    Poisson fits report math.inf.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    family: Family
    terms: List[str]
    coefficients: List[float]
    std_errors: List[float]
    z_values: List[float]
    p_values: List[float]
    log_likelihood: float
    aic: float
    n_params: int
    theta: float
    converged: bool
    iterations: int
    n_obs: int
    underdispersed: bool = False
    loglik_trace: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _identities(self) -> "RegressionResult":
        size = len(self.terms)
        for name in ("coefficients", "std_errors", "z_values", "p_values"):
            if len(getattr(self, name)) != size:
                raise ValueError(f"{name} must have one entry per term")
        for beta, se, z in zip(self.coefficients, self.std_errors, self.z_values):
            if not se > 0:
                raise ValueError("standard errors must be positive")
            if z != beta / se:
                raise ValueError("z must equal coefficient / standard error")
        if self.aic != -2.0 * self.log_likelihood + 2.0 * self.n_params:
            raise ValueError("aic must equal -2 loglik + 2k")
        return self

    def term(self, name: str) -> Dict[str, float]:
        """Coefficient row for one term"""
        position = self.terms.index(name)
        return {
            "estimate": self.coefficients[position],
            "std_error": self.std_errors[position],
            "z": self.z_values[position],
            "p": self.p_values[position],
        }

    @property
    def two_loglik(self) -> float:
        return 2.0 * self.log_likelihood


class Sides(str, Enum):
    TWO_SIDED = "two-sided"
    LESS = "less"
    GREATER = "greater"


class RankSumMethod(str, Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal_approx"


class RankSumResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    w: float
    p: float
    method: RankSumMethod
    n1: int
    n2: int
    sides: Sides = Sides.TWO_SIDED

    @model_validator(mode="after")
    def _w_in_range(self) -> "RankSumResult":
        if not 0 <= self.w <= self.n1 * self.n2:
            raise ValueError("W must lie in [0, n1*n2]")
        return self


class GroupSummary(BaseModel):
    """
    Per-group outcome counts for the group counts layout.

    sd uses the n-1 denominator; groups of one report sd 0 with n_lt_2 set.
    """

    model_config = ConfigDict(frozen=True)

    group: Dict[str, str]
    n: int
    mean: float
    sd: float
    n_lt_2: bool = False
    frequency_mean: Optional[float] = None
    frequency_sd: Optional[float] = None


class LengthSummary(BaseModel):
    """Mean token length of one group's questions for the question length layout."""

    model_config = ConfigDict(frozen=True)

    group: Dict[str, str]
    n_questions: int
    mean_length: Optional[float] = None


class RegressionRow(BaseModel):
    """One reported term of a fitted model for the regression layout."""

    model_config = ConfigDict(frozen=True)

    factors: str
    outcome: str
    term: str
    result: RegressionResult


class RankSumRow(BaseModel):
    """One Wilcoxon comparison for the story contrast layout."""

    model_config = ConfigDict(frozen=True)

    comparison: str
    outcome: str
    result: RankSumResult