import math
from collections.abc import Callable, Sequence
from typing import Protocol

from pydantic import BaseModel

from common.function_model.taylor import TaylorFunction
from common.settings import get_settings

settings = get_settings()


class FunctionPreset(Protocol):
    """Protocol for a named family of test functions.

    Attributes:
        name: The value of ``preset`` that selects this family in a function-spec document.
        certified: False for families no (M, A) can certify; those load only with an override.
    """

    name: str
    certified: bool

    @classmethod
    def build(cls, document: BaseModel) -> TaylorFunction: ...


def truncation_degree(log_term: Callable[[int], float], tol: float | None = None, p_max: int | None = None) -> int:
    """Last index p kept when coefficients are stored while exp(log_term(p)) >= tol, capped at p_max."""
    tol = settings.CERTIFICATE_TAIL_TOL if tol is None else tol
    p_max = settings.P_MAX if p_max is None else p_max
    log_tol = math.log(tol)
    for p in range(1, p_max + 1):
        if log_term(p) < log_tol:
            return p - 1
    return p_max


def fitted_scale(coeffs: Sequence[complex], A: float) -> float:
    """max_p |c_p| (2p)! / A^p, the smallest M certifying a finite support (1 for the zero function)."""
    scales = [abs(c) * math.exp(math.lgamma(2 * p + 1) - p * math.log(A)) for p, c in enumerate(coeffs)]
    return max(scales, default=0.0) or 1.0
