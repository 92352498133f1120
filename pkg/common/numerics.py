"""Basis functions, closed-form basis moments, compensated summation and circle quadrature.

Everything here is a pure function of its inputs.
"""

import cmath
import logging
import math
from collections.abc import Callable, Iterable

import numpy as np
from scipy.special import gammaln

from common.exceptions import ConditioningError, LengthMismatchError, NonFiniteValueError, TruncationError
from common.types import ComplexValue, ContourSpec

logger = logging.getLogger(__name__)

LOG_DOUBLE_MAX = math.log(np.finfo(np.float64).max)
# relative rounding of one log-space Poisson term, from its log-gamma magnitude and phase
TERM_ROUNDING = 1e-12


def log_poisson_weight(n: int, b_n: float, k: int | np.ndarray, z: ComplexValue) -> tuple:
    """Log-magnitude and phase of e^{-nz/b_n} (nz/b_n)^k / k!.

    Returns -inf for the log-magnitude when z = 0 and k > 0.
    """
    lam = n * z / b_n
    k = np.asarray(k)
    if lam == 0:
        log_magnitude = np.where(k == 0, 0.0, -np.inf)
        return log_magnitude, np.zeros_like(log_magnitude)
    log_magnitude = k * math.log(abs(lam)) - lam.real - gammaln(k + 1)
    phase = k * cmath.phase(lam) - lam.imag
    return log_magnitude, phase


def poisson_weight(n: int, b_n: float, k: int, z: ComplexValue) -> ComplexValue:
    """The Szasz-Mirakjan weight p_{n,k}(z / b_n), stable for k far beyond 171."""
    log_magnitude, phase = log_poisson_weight(n, b_n, k, complex(z))
    log_magnitude = float(log_magnitude)
    if log_magnitude > LOG_DOUBLE_MAX:
        msg = f"poisson_weight overflows for n={n}, b_n={b_n}, k={k}, z={z}"
        raise NonFiniteValueError(msg)
    if log_magnitude == -np.inf:
        return 0j
    return cmath.rect(math.exp(log_magnitude), float(phase))


def poisson_weights(n: int, b_n: float, k_max: int, z: ComplexValue) -> np.ndarray:
    """p_{n,k}(z / b_n) for k = 0..k_max in one vectorised pass."""
    log_magnitude, phase = log_poisson_weight(n, b_n, np.arange(k_max + 1), complex(z))
    if np.any(log_magnitude > LOG_DOUBLE_MAX):
        msg = f"poisson_weights overflow for n={n}, b_n={b_n}, k_max={k_max}, z={z}"
        raise NonFiniteValueError(msg)
    return np.exp(log_magnitude) * np.exp(1j * phase)


def log_bernstein_moment_integral(n: int, k: int | np.ndarray, p: int | np.ndarray, b_n: float):
    return (
        (np.asarray(p) + 1) * math.log(b_n)
        + gammaln(n + 1)
        + gammaln(np.asarray(k) + np.asarray(p) + 1)
        - gammaln(np.asarray(k) + 1)
        - gammaln(n + np.asarray(p) + 2)
    )


def bernstein_moment_integral(n: int, k: int, p: int, b_n: float) -> float:
    """Integral of phi_{n,k}(t / b_n) t^p over [0, b_n].

    Evaluated as b_n^{p+1} n! (k+p)! / (k! (n+p+1)!) through log-gamma. For k > n the Bernstein
    weight itself vanishes; the closed form is the continuation that keeps F_n(e_0) = 1 and the
    moment recurrence exact, and it is what the direct series uses.
    """
    return float(np.exp(log_bernstein_moment_integral(n, k, p, b_n)))


def compensated_sum(terms: Iterable[ComplexValue] | np.ndarray, axis: int | None = None):
    """Exactly rounded sum of complex terms, real and imaginary parts summed separately.

    With ``axis`` set, ``terms`` must be an array and the sum runs along that axis.
    """
    if axis is None:
        values = np.asarray(list(terms) if not isinstance(terms, np.ndarray) else terms, dtype=np.complex128)
        return complex(math.fsum(values.real.ravel()), math.fsum(values.imag.ravel()))
    values = np.moveaxis(np.asarray(terms, dtype=np.complex128), axis, -1)
    flat = values.reshape(-1, values.shape[-1])
    sums = np.array([complex(math.fsum(row.real), math.fsum(row.imag)) for row in flat])
    return sums.reshape(values.shape[:-1])


def contour_integral(samples: list[ComplexValue] | np.ndarray, contour: ContourSpec) -> ComplexValue:
    """Trapezoidal value of (1 / 2 pi i) times the integral of g over the circle.

    With nu_j = center + radius e^{i theta_j}, d nu = i (nu_j - center) d theta, so the sum reduces
    to the mean of g(nu_j) (nu_j - center).
    """
    values = np.asarray(samples, dtype=np.complex128)
    if values.shape != (contour.node_count,):
        msg = f"expected {contour.node_count} samples, got {values.shape}"
        raise LengthMismatchError(msg)
    offsets = contour.nodes() - contour.center
    result = compensated_sum(values * offsets) / contour.node_count
    if not cmath.isfinite(result):
        msg = f"contour integral is not finite on {contour}"
        raise NonFiniteValueError(msg)
    return result


def gauss_legendre_rule(node_count: int, lower: float, upper: float) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(node_count)
    half_width = (upper - lower) / 2.0
    return half_width * nodes + (upper + lower) / 2.0, half_width * weights


def poisson_truncation_index(
    n: int,
    b_n: float,
    z: ComplexValue,
    log_inner: Callable[[int], float],
    growth: int,
    tol: float,
    k_max: int,
) -> int:
    """Smallest K past n|z|/b_n where the geometric majorant of the dropped Poisson tail is below tol.

    ``log_inner(k)`` is the log of a bound on the inner factor multiplying |p_{n,k}|; ``growth`` is
    the polynomial degree in k of that factor, so successive terms shrink at least by
    lambda (k + growth + 1) / (k + 1)^2.
    """
    lam = n * abs(z) / b_n
    if lam == 0:
        return 0
    k = max(int(math.floor(lam)) + 1, 1)
    while k <= k_max:
        q = lam * (k + growth + 2) / (k + 2) ** 2
        if q < 1:
            log_term = (k + 1) * math.log(lam) - n * complex(z).real / b_n - math.lgamma(k + 2) + log_inner(k + 1)
            if log_term - math.log1p(-q) < math.log(tol):
                return k
        k += 1
    msg = f"Poisson series at z={z} (n={n}, b_n={b_n}) needs more than {k_max} terms for tol={tol}"
    raise TruncationError(msg)


def check_conditioning(value: ComplexValue, condition: float, rtol: float, description: str) -> None:
    """Raise ConditioningError unless TERM_ROUNDING * condition <= rtol (1 + |value|).

    ``condition`` is the sum of the moduli of the terms that produced ``value``.
    """
    rounding = TERM_ROUNDING * condition
    if rounding > rtol * (1 + abs(value)):
        msg = (
            f"{description} cancels: sum of |terms| is {condition:.3e} against |sum| {abs(value):.3e}, "
            f"so rounding of about {rounding:.1e} exceeds rtol={rtol}"
        )
        raise ConditioningError(msg)
