"""Moment polynomials Pi_{n,p} = F_n(e_p), built by recurrence and checked against the direct series."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from common.exceptions import MomentTableSizeError
from common.function_model.polynomial import ComplexPolynomial
from common.numerics import (
    check_conditioning,
    compensated_sum,
    log_bernstein_moment_integral,
    poisson_truncation_index,
    poisson_weights,
)
from common.settings import get_settings
from common.types import ComplexValue

logger = logging.getLogger(__name__)
settings = get_settings()


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Pi_{n,0..p_max} for one (n, b_n)."""

    n: int
    b_n: float
    polys: tuple[ComplexPolynomial, ...]

    @property
    def p_max(self) -> int:
        return len(self.polys) - 1

    def evaluate(self, p: int, z):
        return self.polys[p](z)

    def evaluate_all(self, z) -> np.ndarray:
        """Values of every moment at z, stacked along a new leading axis of length p_max + 1."""
        points = np.asarray(z, dtype=np.complex128)
        return np.stack([np.asarray(poly(points), dtype=np.complex128) for poly in self.polys])

    def leading_coefficient_expected(self, p: int) -> float:
        """n^p (n+1)! / (n+p+1)!."""
        return math.exp(p * math.log(self.n) + gammaln(self.n + 2) - gammaln(self.n + p + 2))


def moment_recurrence(n: int, b_n: float, p_max: int) -> MomentTable:
    """Iterate Pi_{p+1} = (b_n z Pi_p' + (n z + (p+1) b_n) Pi_p) / (n+p+2) from Pi_0 = 1."""
    if not 0 <= p_max <= settings.P_MAX:
        msg = f"p_max must be in 0..{settings.P_MAX}, got {p_max}"
        raise MomentTableSizeError(msg)
    polys = [ComplexPolynomial.one()]
    for p in range(p_max):
        current = polys[-1]
        following = current.derivative().times_z() * b_n + current.times_z() * n + current * ((p + 1) * b_n)
        polys.append(following * (1.0 / (n + p + 2)))
    logger.debug("Built moment table n=%s b_n=%s p_max=%s", n, b_n, p_max)
    return MomentTable(n=n, b_n=b_n, polys=tuple(polys))


def moment_direct_with_condition(
    n: int, b_n: float, p: int, z: ComplexValue, tol: float | None = None, rtol: float | None = None
) -> tuple[ComplexValue, float]:
    """The direct series for F_n(e_p; z) together with the sum of the moduli of its terms.

    The second value measures cancellation: for Re z < 0 the Poisson weights alternate in phase and
    the sum can be many orders of magnitude below it. Raises ConditioningError when that cancellation
    leaves less than rtol (default DIRECT_SERIES_RTOL) relative accuracy.
    """
    tol = settings.SERIES_TOL if tol is None else tol
    if not tol > 0:
        msg = f"tol must be positive, got {tol}"
        raise ValueError(msg)
    log_scale = math.log((n + 1) / b_n)
    k_last = poisson_truncation_index(
        n,
        b_n,
        z,
        log_inner=lambda k: log_scale + float(log_bernstein_moment_integral(n, k, p, b_n)),
        growth=p,
        tol=tol,
        k_max=settings.K_MAX,
    )
    k = np.arange(k_last + 1)
    inner = np.exp(log_scale + log_bernstein_moment_integral(n, k, p, b_n))
    terms = poisson_weights(n, b_n, k_last, z) * inner
    value, condition = compensated_sum(terms), float(np.sum(np.abs(terms)))
    check_conditioning(
        value,
        condition,
        settings.DIRECT_SERIES_RTOL if rtol is None else rtol,
        f"direct moment series for n={n}, b_n={b_n}, p={p}, z={z}",
    )
    return value, condition


def moment_direct(n: int, b_n: float, p: int, z: ComplexValue, tol: float | None = None) -> ComplexValue:
    """(n+1)/b_n sum_k p_{n,k}(z/b_n) integral_0^{b_n} phi_{n,k}(t/b_n) t^p dt, truncated once the tail is below tol."""
    value, _ = moment_direct_with_condition(n, b_n, p, z, tol)
    return value


def moment_error_bound(n: int, b_n: float, p: int, r: float) -> float:
    """(2p)! r^p (b_n+1)/(n+2)."""
    return math.exp(gammaln(2 * p + 1) + p * math.log(r)) * (b_n + 1) / (n + 2)
