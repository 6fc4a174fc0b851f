from typing import Hashable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from sklearn.metrics import cohen_kappa_score, confusion_matrix

from utils.exceptions import DegenerateMarginals, EmptyInput, LengthMismatch


class AgreementResult(BaseModel):
    """
    Two-coder agreement.

    Attributes:
        n (int): Number of paired labels
        observed (float): Fraction of exact matches (p_o)
        expected (float): Chance agreement from the coders' marginals (p_e)
        kappa (float): (p_o - p_e) / (1 - p_e)
    """

    model_config = ConfigDict(frozen=True)

    n: int
    observed: float
    expected: float
    kappa: float


def agreement(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> AgreementResult:
    """
    Compute Cohen's kappa with its observed and chance agreement.

    Args:
        labels_a: Labels from the first coder
        labels_b: Labels from the second coder, same length

    Returns:
        AgreementResult: p_o, p_e and kappa

    Raises:
        LengthMismatch: Sequences differ in length
        EmptyInput: Sequences are empty
        DegenerateMarginals: Both coders used one identical label, so p_e = 1
    """
    coder_a = [str(label) for label in labels_a]
    coder_b = [str(label) for label in labels_b]
    if len(coder_a) != len(coder_b):
        raise LengthMismatch(
            "label sequences differ in length", a=len(coder_a), b=len(coder_b)
        )
    if not coder_a:
        raise EmptyInput("label sequences are empty")

    labels = sorted(set(coder_a) | set(coder_b))
    matrix = confusion_matrix(coder_a, coder_b, labels=labels).astype(float)
    total = matrix.sum()
    observed = float(np.trace(matrix) / total)
    expected = float(matrix.sum(axis=1) @ matrix.sum(axis=0) / total**2)
    if np.isclose(expected, 1.0):
        raise DegenerateMarginals("kappa is undefined when chance agreement is 1")

    kappa = float(cohen_kappa_score(coder_a, coder_b, labels=labels))
    return AgreementResult(n=len(coder_a), observed=observed, expected=expected, kappa=kappa)


def cohen_kappa(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> float:
    """Cohen's kappa between two coders, in [-1, 1]"""
    return agreement(labels_a, labels_b).kappa
