"""The complex Szasz-Durrmeyer-Chlodowsky operator F_n applied to Taylor functions.

``apply`` sums c_p Pi_{n,p}(z) over a cached moment table; ``apply_direct`` evaluates the defining
Poisson series with quadrature for the inner integrals and shares no code path with the table.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.stats import binom

from common.exceptions import DivergenceError, DomainError, QuadratureNotConvergedError
from common.function_model.polynomial import ComplexPolynomial
from common.function_model.taylor import (
    DECAY_SLACK,
    TAIL_TERMS,
    TaylorFunction,
    certificate_tail_bound,
    derivative_coeffs,
    eval_taylor,
    log_certificate_envelope,
)
from common.moments import MomentTable, moment_recurrence
from common.numerics import (
    check_conditioning,
    compensated_sum,
    gauss_legendre_rule,
    log_bernstein_moment_integral,
    poisson_truncation_index,
    poisson_weights,
)
from common.settings import get_settings
from common.types import ComplexValue, OperatorConfig

logger = logging.getLogger(__name__)
settings = get_settings()

# relative rounding floor of the Gauss-Legendre inner integrals
QUADRATURE_ROUNDING = 1e-11


@lru_cache(maxsize=512)
def get_moment_table(n: int, b_n: float, p_max: int) -> MomentTable:
    return moment_recurrence(n, b_n, p_max)


def check_domain(f: TaylorFunction, cfg: OperatorConfig, z) -> np.ndarray:
    points = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(points) > f.R * (1 + DECAY_SLACK)):
        msg = f"|z| exceeds the radius R={f.R} of {f.label}"
        raise DomainError(msg)
    if np.any(points.real > cfg.b_n * (1 + DECAY_SLACK)):
        msg = f"Re(z) exceeds b_n={cfg.b_n} for n={cfg.n}"
        raise DomainError(msg)
    return points


def _collapse(values: np.ndarray):
    return complex(values) if values.ndim == 0 else values


def apply(f: TaylorFunction, cfg: OperatorConfig, z):
    """F_n(f; z) = sum_p c_p Pi_{n,p}(z) over the stored coefficients. Scalar or array z."""
    points = check_domain(f, cfg, z)
    if f.coeffs.size == 0:
        return _collapse(np.zeros(points.shape, dtype=np.complex128))
    table = get_moment_table(cfg.n, cfg.b_n, f.degree)
    moments = table.evaluate_all(points)
    coeffs = f.coeffs.reshape((-1,) + (1,) * points.ndim)
    return _collapse(compensated_sum(coeffs * moments, axis=0))


def apply_derivative(f: TaylorFunction, cfg: OperatorConfig, z, order: int):
    """The order-th derivative of F_n f, as sum_p c_p Pi_{n,p}^(order)(z)."""
    points = check_domain(f, cfg, z)
    if f.degree < order:
        return _collapse(np.zeros(points.shape, dtype=np.complex128))
    table = get_moment_table(cfg.n, cfg.b_n, f.degree)
    derivatives = np.stack(
        [np.asarray(poly.derivative(order)(points), dtype=np.complex128) for poly in table.polys]
    )
    coeffs = f.coeffs.reshape((-1,) + (1,) * points.ndim)
    return _collapse(compensated_sum(coeffs * derivatives, axis=0))


def apply_tail_bound(f: TaylorFunction, cfg: OperatorConfig, r: float) -> float:
    """Bound on |F_n(f - f_N)| over |z| <= r for the Taylor tail dropped after the stored coefficients.

    Each dropped Pi_{n,p} is at most r^p + (2p)! r^p (b_n+1)/(n+2) in modulus; the certificate then gives
    M sum (Ar)^p/(2p)! + M (b_n+1)/(n+2) sum (Ar)^p over p > N. Finite series have no tail.
    """
    if f.tail_bound == 0:
        return 0.0
    if not f.certified or f.A * r >= 1:
        return math.inf
    tail_index = f.degree + 1
    geometric = f.M * (f.A * r) ** tail_index / (1 - f.A * r)
    return certificate_tail_bound(f.M, f.A, r, f.degree) + geometric * cfg.rate


def truncation_error_bound(f: TaylorFunction, cfg: OperatorConfig, r: float) -> float:
    """Bound on |(F_n f - f) - (F_n f_N - f_N)| over |z| <= r, the error the stored coefficients cannot see."""
    if f.tail_bound == 0:
        return 0.0
    operator_tail = apply_tail_bound(f, cfg, r)
    if math.isinf(operator_tail):
        return math.inf
    return operator_tail + certificate_tail_bound(f.M, f.A, r, f.degree)


def voronovskaja_tail_bound(f: TaylorFunction, cfg: OperatorConfig, r: float) -> float:
    """truncation_error_bound plus the dropped tail of voronovskaja_term, both over |z| <= r."""
    truncation = truncation_error_bound(f, cfg, r)
    if truncation == 0 or math.isinf(truncation):
        return truncation
    p = np.arange(f.degree + 1, f.degree + 1 + TAIL_TERMS)
    envelope = np.exp(log_certificate_envelope(f.M, f.A, p))
    first = float(np.sum(p * envelope * r ** (p - 1.0)))
    second = float(np.sum(p * (p - 1) * envelope * r ** (p - 2.0)))
    b_n = cfg.b_n
    term = b_n / (cfg.n + 2) * ((1 + 2 * r / b_n) * first + r * (1 + r / (2 * b_n)) * second)
    return truncation + term


def series_growth_factor(cfg: OperatorConfig, z: ComplexValue) -> float:
    """exp(n (|z| - Re z) / b_n), the sum of |p_{n,k}(z / b_n)| over k."""
    return math.exp(cfg.n * (abs(z) - complex(z).real) / cfg.b_n)


def _quadrature_inner(f: TaylorFunction, n: int, b_n: float, node_count: int) -> tuple[np.ndarray, np.ndarray]:
    """integral_0^{b_n} phi_{n,k}(t/b_n) f(t) dt for k = 0..n by Gauss-Legendre, and the same with |f|."""
    nodes, weights = gauss_legendre_rule(node_count, 0.0, b_n)
    # the stored series is a polynomial, so it extends to all of [0, b_n] even past R
    values = ComplexPolynomial(f.coeffs)(nodes)
    basis = binom.pmf(np.arange(n + 1)[:, np.newaxis], n, nodes / b_n)
    return basis @ (weights * values), basis @ (weights * np.abs(values))


def apply_direct_with_condition(
    f: TaylorFunction, cfg: OperatorConfig, z: ComplexValue
) -> tuple[ComplexValue, float]:
    """The defining series of F_n(f; z) and the sum of the moduli of its terms.

    For k <= n the inner integral is Gauss-Legendre quadrature of f against phi_{n,k}. For k > n the
    Bernstein weight vanishes and the continued Beta closed form is used termwise in c_p, which keeps
    F_n(e_0) = 1.

    Raises ConditioningError when the terms cancel beyond DIRECT_SERIES_RTOL, which happens for Re z < 0
    once series_growth_factor is large.
    """
    check_domain(f, cfg, z)
    n, b_n = cfg.n, cfg.b_n
    if f.coeffs.size == 0:
        return 0j, 0.0
    degree = f.degree
    scale = (n + 1) / b_n
    log_scale = math.log(scale)
    magnitudes = np.abs(f.coeffs)
    support = np.flatnonzero(magnitudes)
    if support.size == 0:
        return 0j, 0.0

    def log_inner(k: int) -> float:
        logs = log_bernstein_moment_integral(n, k, support, b_n) + np.log(magnitudes[support])
        return log_scale + float(np.logaddexp.reduce(logs))

    k_last = poisson_truncation_index(
        n, b_n, z, log_inner=log_inner, growth=degree, tol=cfg.series_tol, k_max=settings.K_MAX
    )

    node_count = max(cfg.quadrature_nodes, (n + degree) // 2 + 1)
    inner, _ = _quadrature_inner(f, n, b_n, node_count)
    refined, absolute = _quadrature_inner(f, n, b_n, 2 * node_count)
    # rounding of binom.pmf times f is relative to the integral of |f| against phi_{n,k}
    moved = np.abs(inner - refined)
    allowed = max(10 * cfg.series_tol, QUADRATURE_ROUNDING) * absolute
    if np.any(moved > allowed):
        worst = int(np.argmax(moved - allowed))
        msg = (
            f"inner quadrature for n={n}, b_n={b_n} moved by {moved[worst]:.3e} at k={worst} "
            f"when doubling {node_count} nodes"
        )
        raise QuadratureNotConvergedError(msg)
    inner = refined[: k_last + 1]

    if k_last > n:
        k = np.arange(n + 1, k_last + 1)[:, np.newaxis]
        continued = np.exp(log_bernstein_moment_integral(n, k, np.arange(degree + 1), b_n)) @ f.coeffs
        inner = np.concatenate((inner, continued))

    terms = scale * poisson_weights(n, b_n, k_last, z) * inner
    value, condition = compensated_sum(terms), float(np.sum(np.abs(terms)))
    check_conditioning(
        value,
        condition,
        settings.DIRECT_SERIES_RTOL,
        f"direct series of {f.label} at n={n}, z={z} (Poisson growth {series_growth_factor(cfg, z):.2e})",
    )
    return value, condition


def apply_direct(f: TaylorFunction, cfg: OperatorConfig, z: ComplexValue) -> ComplexValue:
    value, _ = apply_direct_with_condition(f, cfg, z)
    return value


def voronovskaja_term(f: TaylorFunction, cfg: OperatorConfig, z):
    """b_n/(n+2) ((1 - 2z/b_n) f'(z) + z (1 - z/(2 b_n)) f''(z))."""
    points = check_domain(f, cfg, z)
    b_n = cfg.b_n
    first = eval_taylor(derivative_coeffs(f, 1), points)
    second = eval_taylor(derivative_coeffs(f, 2), points)
    term = b_n / (cfg.n + 2) * ((1 - 2 * points / b_n) * first + points * (1 - points / (2 * b_n)) * second)
    return _collapse(np.asarray(term))


def residual(f: TaylorFunction, cfg: OperatorConfig, z):
    """F_n(f; z) - f(z) - voronovskaja_term(f; z)."""
    points = check_domain(f, cfg, z)
    return _collapse(
        np.asarray(apply(f, cfg, points)) - np.asarray(eval_taylor(f, points)) - voronovskaja_term(f, cfg, points)
    )


def upper_constant(M: float, A: float, r: float) -> float:
    """C_{r,A} = M sum_{p>=1} (Ar)^p = M Ar / (1 - Ar)."""
    q = A * r
    if q >= 1:
        msg = f"C_(r,A) diverges for A*r = {q} >= 1"
        raise DivergenceError(msg)
    return M * q / (1 - q)


def voronovskaja_constant(M: float, A: float, r: float) -> float:
    """L_{r,A} = 2M / ((1 - Ar) log(1/(Ar))) + 4M Ar / (1 - Ar)^2.

    The finite sum over p <= (n+2)/b_n is replaced by its infinite majorant, which holds for every n.
    """
    q = A * r
    if q >= 1:
        msg = f"L_(r,A) diverges for A*r = {q} >= 1"
        raise DivergenceError(msg)
    if q == 0:
        return 0.0
    return 2 * M / ((1 - q) * math.log(1 / q)) + 4 * M * q / (1 - q) ** 2


