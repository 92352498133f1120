"""Sup norms on circles, Cauchy-integral derivatives, bound functionals and convergence-order fits."""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from common.durrmeyer import (
    apply,
    residual,
    truncation_error_bound,
    upper_constant,
    voronovskaja_constant,
    voronovskaja_tail_bound,
)
from common.exceptions import (
    ContourNotConvergedError,
    DegenerateDataError,
    GeometryError,
    PointOnContourError,
)
from common.function_model.polynomial import ComplexPolynomial
from common.function_model.taylor import TaylorFunction, derivative_coeffs, eval_taylor
from common.numerics import contour_integral
from common.settings import get_settings
from common.types import ContourSpec, ConvergenceRecord, OperatorConfig, OrderFit

logger = logging.getLogger(__name__)
settings = get_settings()

ComplexFunction = Callable[[np.ndarray], np.ndarray]

BERNSTEIN_SLACK = 1e-9
EXACT_TOL = 1e-13
MIN_FIT_POINTS = 5
MIN_SAMPLES = 64


def disk_sup_norm(g: ComplexFunction, r: float, samples: int | None = None) -> float:
    """max |g| over |z| <= r, read off the circle |z| = r by the maximum-modulus principle.

    ``g`` takes an array of points. The best of ``samples`` equispaced nodes is refined by a bounded
    scalar search over the two adjacent arcs.
    """
    samples = settings.SUP_NORM_SAMPLES if samples is None else samples
    if samples < MIN_SAMPLES:
        msg = f"disk_sup_norm needs at least {MIN_SAMPLES} samples, got {samples}"
        raise ValueError(msg)
    theta = 2.0 * np.pi * np.arange(samples) / samples
    moduli = np.abs(np.asarray(g(r * np.exp(1j * theta))))
    best = int(np.argmax(moduli))
    sampled = float(moduli[best])
    if sampled == 0:
        return 0.0
    step = 2.0 * np.pi / samples

    def negative_modulus(angle: float) -> float:
        return -float(np.abs(np.asarray(g(np.array([r * np.exp(1j * angle)])))[0]))

    refined = minimize_scalar(
        negative_modulus,
        bounds=(theta[best] - step, theta[best] + step),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return max(sampled, -float(refined.fun))


@dataclass(frozen=True, eq=False)
class CauchyDerivative:
    """p-th derivative of g inside a circle, from samples of g on the circle.

    Evaluates p!/(2 pi i) times the contour integral of g(nu)/(nu - z)^{p+1} for any z strictly inside.
    """

    order: int
    contour: ContourSpec
    samples: np.ndarray

    @classmethod
    def build(cls, g: ComplexFunction, order: int, contour: ContourSpec, checkpoints) -> "CauchyDerivative":
        """Double the node count from contour.node_count until the values at ``checkpoints`` settle."""
        checkpoints = np.atleast_1d(np.asarray(checkpoints, dtype=np.complex128))
        _check_inside(checkpoints, contour)
        current = cls(order, contour, np.asarray(g(contour.nodes()), dtype=np.complex128))
        values = current(checkpoints)
        while current.contour.node_count < settings.CONTOUR_MAX_NODES:
            finer_contour = current.contour.with_node_count(2 * current.contour.node_count)
            finer = cls(order, finer_contour, np.asarray(g(finer_contour.nodes()), dtype=np.complex128))
            finer_values = finer(checkpoints)
            scale = max(float(np.max(np.abs(finer_values))), finer.cauchy_scale())
            if np.max(np.abs(finer_values - values)) <= settings.CONTOUR_RTOL * scale:
                return finer
            current, values = finer, finer_values
        msg = (
            f"Cauchy derivative of order {order} on radius {contour.radius} did not settle by "
            f"{settings.CONTOUR_MAX_NODES} nodes"
        )
        raise ContourNotConvergedError(msg)

    def cauchy_scale(self) -> float:
        """p! max|g| / radius^p, the Cauchy estimate of the derivative size."""
        return math.factorial(self.order) * float(np.max(np.abs(self.samples))) / self.contour.radius**self.order

    def __call__(self, z):
        points = np.asarray(z, dtype=np.complex128)
        _check_inside(points, self.contour)
        nodes = self.contour.nodes()
        flat = points.reshape(-1)
        values = np.array(
            [contour_integral(self.samples / (nodes - point) ** (self.order + 1), self.contour) for point in flat]
        )
        values = math.factorial(self.order) * values.reshape(points.shape)
        return complex(values) if values.ndim == 0 else values


def _check_inside(points: np.ndarray, contour: ContourSpec) -> None:
    if np.any(np.abs(points - contour.center) >= contour.radius):
        msg = f"point(s) on or outside the contour of radius {contour.radius} about {contour.center}"
        raise PointOnContourError(msg)


def cauchy_derivative(g: ComplexFunction, p: int, z: complex, contour: ContourSpec) -> complex:
    if p < 1:
        msg = f"derivative order must be at least 1, got {p}"
        raise ValueError(msg)
    return CauchyDerivative.build(g, p, contour, checkpoints=[z])(z)


def check_radii(r: float, r1: float) -> None:
    if not 1 <= r < r1:
        msg = f"radii must satisfy 1 <= r < r1, got r={r}, r1={r1}"
        raise GeometryError(msg)


def derivative_error_bound(p: int, r: float, r1: float, C: float, n: int, b_n: float) -> float:
    """(b_n+1) C p! r1 / ((n+2) (r1-r)^{p+1})."""
    check_radii(r, r1)
    return (b_n + 1) * C * math.factorial(p) * r1 / ((n + 2) * (r1 - r) ** (p + 1))


def voronovskaja_polynomial(f: TaylorFunction, b_n: float) -> ComplexPolynomial:
    """z (1 - z/(2 b_n)) f''(z) + (1 - 2z/b_n) f'(z), on the stored coefficients."""
    first = ComplexPolynomial(derivative_coeffs(f, 1).coeffs)
    second = ComplexPolynomial(derivative_coeffs(f, 2).coeffs)
    z_second = second.times_z()
    return z_second + z_second.times_z() * (-1 / (2 * b_n)) + first + first.times_z() * (-2 / b_n)


def lower_order_functional(f: TaylorFunction, cfg: OperatorConfig, r: float, derivative_order: int = 0) -> float:
    """Sup norm on |z| <= r of the Voronovskaja polynomial, or of its derivative of the given order."""
    if f.is_zero():
        msg = f"the lower-order functional of {f.label} vanishes identically: f is the zero function"
        raise DegenerateDataError(msg)
    polynomial = voronovskaja_polynomial(f, cfg.b_n)
    if derivative_order:
        polynomial = polynomial.derivative(derivative_order)
    return disk_sup_norm(polynomial, r)


def bernstein_ratio(P: ComplexPolynomial, r: float) -> float:
    """||P'||_r / ((deg P / r) ||P||_r); Bernstein's inequality says at most 1, with equality for monomials."""
    if P.degree < 1:
        msg = f"Bernstein's inequality needs a polynomial of degree >= 1, got degree {P.degree}"
        raise ValueError(msg)
    return disk_sup_norm(P.derivative(), r) / ((P.degree / r) * disk_sup_norm(P, r))


def bernstein_inequality_check(P: ComplexPolynomial, r: float) -> bool:
    """||P'||_r <= (deg P / r) ||P||_r, with a 1e-9 relative slack for sampling."""
    return bernstein_ratio(P, r) <= 1 + BERNSTEIN_SLACK


def fit_order(records: Sequence[ConvergenceRecord]) -> OrderFit:
    """Least-squares slope of log(error) against log(n), with the range of the recorded ratios."""
    if len(records) < MIN_FIT_POINTS:
        msg = f"an order fit needs at least {MIN_FIT_POINTS} rows, got {len(records)}"
        raise DegenerateDataError(msg)
    ns = [record.n for record in records]
    if len(set(ns)) != len(ns):
        msg = f"an order fit needs distinct n, got {ns}"
        raise DegenerateDataError(msg)
    errors = np.array([record.error for record in records])
    if np.any(errors <= 0) or not np.all(np.isfinite(errors)) or any(record.exact for record in records):
        msg = "an order fit needs strictly positive finite errors; the error vanished on some rows"
        raise DegenerateDataError(msg)
    slope, intercept = np.polyfit(np.log(ns), np.log(errors), 1)
    ratios = [record.ratio for record in records]
    return OrderFit(slope=float(slope), intercept=float(intercept), ratio_min=min(ratios), ratio_max=max(ratios))


def reference_slope(records: Sequence[ConvergenceRecord], power: int = 1) -> float:
    """Slope of log(((b_n+1)/(n+2))^power) against log(n) on the grid of the records."""
    ns = np.array([record.n for record in records], dtype=np.float64)
    rates = np.array([(record.b_n + 1) / (record.n + 2) for record in records])
    slope, _ = np.polyfit(np.log(ns), power * np.log(rates), 1)
    return float(slope)


def voronovskaja_reference_slope(
    f: TaylorFunction,
    records: Sequence[ConvergenceRecord],
    bn_rule: str | float,
    r: float,
    derivative_order: int = 0,
) -> float:
    """Slope of log(b_n/(n+2) lower_order_functional) against log(n) on the grid of the records.

    For derivatives the f' and b_n f'' parts of this term compete on practical grids, so the slope can sit
    well away from that of (b_n+1)/(n+2).
    """
    ns = np.array([record.n for record in records], dtype=np.float64)
    leading = []
    for record in records:
        cfg = OperatorConfig(n=record.n, bn_rule=bn_rule)
        leading.append(cfg.b_n / (cfg.n + 2) * lower_order_functional(f, cfg, r, derivative_order))
    leading = np.array(leading)
    if np.any(leading <= 0):
        msg = f"the Voronovskaja term of {f.label} vanishes on the grid; no reference slope"
        raise DegenerateDataError(msg)
    slope, _ = np.polyfit(np.log(ns), np.log(leading), 1)
    return float(slope)


def running_slopes(records: Sequence[ConvergenceRecord]) -> list[float | None]:
    """Fitted slope over the rows up to and including each row; None until two positive errors exist."""
    slopes: list[float | None] = []
    for end in range(1, len(records) + 1):
        head = [record for record in records[:end] if record.error > 0]
        if len(head) < 2:  # noqa: PLR2004
            slopes.append(None)
            continue
        slope, _ = np.polyfit(np.log([r.n for r in head]), np.log([r.error for r in head]), 1)
        slopes.append(float(slope))
    return slopes


def convergence_row(f: TaylorFunction, cfg: OperatorConfig, r: float, n0: int | None = None) -> ConvergenceRecord:
    """||F_n f - f||_r against C_{r,A} (b_n+1)/(n+2)."""
    n0 = settings.N0 if n0 is None else n0
    error = disk_sup_norm(lambda z: np.asarray(apply(f, cfg, z)) - np.asarray(eval_taylor(f, z)), r)
    bound = upper_constant(f.M, f.A, r) * cfg.rate
    return ConvergenceRecord(
        n=cfg.n,
        b_n=cfg.b_n,
        error=error,
        bound=bound,
        ratio=error / cfg.rate,
        tail=truncation_error_bound(f, cfg, r),
        exact=error <= EXACT_TOL,
        checked=cfg.n >= n0,
    )


def voronovskaja_row(f: TaylorFunction, cfg: OperatorConfig, r: float, n0: int | None = None) -> ConvergenceRecord:
    """||F_n f - f - voronovskaja_term||_r against L_{r,A} ((b_n+1)/(n+2))^2. The ratio is against the squared rate."""
    n0 = settings.N0 if n0 is None else n0
    error = disk_sup_norm(lambda z: residual(f, cfg, z), r)
    bound = voronovskaja_constant(f.M, f.A, r) * cfg.rate**2
    return ConvergenceRecord(
        n=cfg.n,
        b_n=cfg.b_n,
        error=error,
        bound=bound,
        ratio=error / cfg.rate**2,
        tail=voronovskaja_tail_bound(f, cfg, r),
        exact=error <= EXACT_TOL,
        checked=cfg.n >= n0,
    )


def derivative_row(
    f: TaylorFunction,
    cfg: OperatorConfig,
    r: float,
    r1: float,
    order: int,
    samples: int = 128,
    n0: int | None = None,
) -> ConvergenceRecord:
    """||(F_n f)^(order) - f^(order)||_r with the derivative of F_n f taken by Cauchy's formula on |nu| = r1."""
    n0 = settings.N0 if n0 is None else n0
    check_radii(r, r1)
    contour = ContourSpec(radius=r1)
    checkpoints = r * np.exp(2j * np.pi * np.arange(16) / 16)
    derivative = CauchyDerivative.build(lambda nu: apply(f, cfg, nu), order, contour, checkpoints)
    target = derivative_coeffs(f, order)
    error = disk_sup_norm(lambda z: derivative(z) - np.asarray(eval_taylor(target, z)), r, samples)
    bound = derivative_error_bound(order, r, r1, upper_constant(f.M, f.A, r1), cfg.n, cfg.b_n)
    # Cauchy's estimate carries the tail on |nu| = r1 down to the derivative on |z| <= r
    tail = math.factorial(order) * r1 / (r1 - r) ** (order + 1) * truncation_error_bound(f, cfg, r1)
    return ConvergenceRecord(
        n=cfg.n,
        b_n=cfg.b_n,
        error=error,
        bound=bound,
        ratio=error / cfg.rate,
        tail=tail,
        derivative_order=order,
        exact=error <= EXACT_TOL,
        checked=cfg.n >= n0,
    )


def find_n_star(
    f: TaylorFunction,
    bn_rule: str | float,
    r: float,
    n0: int | None = None,
    n_cap: int | None = None,
) -> int | None:
    """First n >= n0 with (b_n+1)/(n+2) L_{r,A} <= lower_order_functional / 2.

    Searched by doubling then bisection; None when the condition first holds beyond n_cap.
    """
    n0 = settings.N0 if n0 is None else n0
    n_cap = settings.N_STAR_CAP if n_cap is None else n_cap
    constant = voronovskaja_constant(f.M, f.A, r)

    def holds(n: int) -> bool:
        cfg = OperatorConfig(n=n, bn_rule=bn_rule)
        return cfg.rate * constant <= 0.5 * lower_order_functional(f, cfg, r)

    if holds(n0):
        return n0
    low, high = n0, n0
    while not holds(high):
        low = high
        high *= 2
        if high > n_cap:
            if holds(n_cap):
                high = n_cap
                break
            logger.info("n* for %s is beyond the cap %s", f.label, n_cap)
            return None
    while high - low > 1:
        middle = (low + high) // 2
        if holds(middle):
            high = middle
        else:
            low = middle
    return high


def lower_bound_constant(records: Sequence[ConvergenceRecord], functional: float, n_star: int | None) -> float:
    """min of the ratios recorded below n* and half the lower functional."""
    below = [record.ratio for record in records if n_star is None or record.n < n_star]
    return min([*below, 0.5 * functional])


