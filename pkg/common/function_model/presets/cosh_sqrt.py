import math

import numpy as np
from scipy.special import gammaln

from common.function_model.documents import CoshSqrtDocument
from common.function_model.presets.base import truncation_degree
from common.function_model.taylor import TaylorFunction, certificate_tail_bound


class CoshSqrtPreset:
    """M cosh(sqrt(A z)), whose coefficients M A^p / (2p)! sit exactly on the certificate."""

    name = "cosh_sqrt"
    certified = True

    @classmethod
    def build(cls, document: CoshSqrtDocument) -> TaylorFunction:
        radius = document.radius()
        if document.truncate is None:
            degree = truncation_degree(
                lambda p: math.log(document.M) + p * math.log(document.A * radius) - math.lgamma(2 * p + 1)
            )
        else:
            degree = document.truncate
        p = np.arange(degree + 1)
        coeffs = document.M * np.exp(p * math.log(document.A) - gammaln(2 * p + 1))
        return TaylorFunction(
            coeffs=coeffs,
            M=document.M,
            A=document.A,
            R=radius,
            tail_bound=certificate_tail_bound(document.M, document.A, radius, degree),
            label="cosh_sqrt",
        )
