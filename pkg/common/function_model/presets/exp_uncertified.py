import math

import numpy as np
from scipy.special import gammaln

from common.function_model.documents import ExpUncertifiedDocument
from common.function_model.presets.base import truncation_degree
from common.function_model.taylor import TAIL_TERMS, TaylorFunction


class ExpUncertifiedPreset:
    """exp(z), c_p = 1/p!. (2p)!/(p! A^p) is unbounded, so every (M, A) fails at some index."""

    name = "exp_uncertified"
    certified = False

    @classmethod
    def build(cls, document: ExpUncertifiedDocument) -> TaylorFunction:
        radius = document.radius()
        if document.truncate is None:
            degree = truncation_degree(lambda p: p * math.log(radius) - math.lgamma(p + 1))
        else:
            degree = document.truncate
        p = np.arange(degree + 1)
        tail = np.arange(degree + 1, degree + 1 + TAIL_TERMS)
        return TaylorFunction(
            coeffs=np.exp(-gammaln(p + 1)),
            M=document.M,
            A=document.A,
            R=radius,
            tail_bound=float(np.sum(np.exp(tail * math.log(radius) - gammaln(tail + 1)))),
            certified=False,
            label="exp_uncertified",
        )
