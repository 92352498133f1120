"""Analytic functions of the class H_R held as truncated Taylor series with a decay certificate.

A certificate (M, A) asserts |c_p| <= M A^p / (2p)! for every stored p. Certified functions enforce it
on construction; uncertified ones keep the numbers but are flagged so bound suites can report them as
negative controls.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from common.exceptions import CertificateViolationError, DomainError
from common.numerics import compensated_sum
from common.types import ComplexValue

logger = logging.getLogger(__name__)

DECAY_SLACK = 1e-12
MAX_DERIVATIVE_ORDER = 4
TAIL_TERMS = 200


class DecayCheck(NamedTuple):
    valid: bool
    first_violation: int | None


def log_certificate_envelope(M: float, A: float, p: int | np.ndarray) -> np.ndarray:
    """log(M A^p / (2p)!)."""
    p = np.asarray(p)
    return math.log(M) + p * math.log(A) - gammaln(2 * p + 1)


def validate_decay(coeffs, M: float, A: float) -> DecayCheck:
    """Check |c_p| <= M A^p / (2p)! for every stored p, with a 1e-12 relative slack."""
    magnitudes = np.abs(np.asarray(coeffs, dtype=np.complex128))
    if magnitudes.size == 0:
        return DecayCheck(valid=True, first_violation=None)
    if not (M > 0 and 0 < A):
        nonzero = np.flatnonzero(magnitudes)
        if nonzero.size:
            return DecayCheck(valid=False, first_violation=int(nonzero[0]))
        return DecayCheck(valid=True, first_violation=None)
    envelope = log_certificate_envelope(M, A, np.arange(magnitudes.size)) + math.log1p(DECAY_SLACK)
    with np.errstate(divide="ignore"):
        violations = np.flatnonzero(np.log(magnitudes) > envelope)
    if violations.size:
        return DecayCheck(valid=False, first_violation=int(violations[0]))
    return DecayCheck(valid=True, first_violation=None)


def certificate_tail_bound(M: float, A: float, radius: float, last_index: int) -> float:
    """M * sum_{p > last_index} (A radius)^p / (2p)!, the certified bound on a dropped tail."""
    p = np.arange(last_index + 1, last_index + 1 + TAIL_TERMS)
    return float(np.sum(np.exp(math.log(M) + p * math.log(A * radius) - gammaln(2 * p + 1))))


@dataclass(frozen=True, eq=False)
class TaylorFunction:
    """f(z) = sum c_p z^p on the disk |z| <= R, stored up to p = len(coeffs) - 1.

    Attributes:
        coeffs: Taylor coefficients c_0..c_N.
        M: Certificate scale.
        A: Certificate rate in (0, 1).
        R: Radius of the disk D_R, greater than 1.
        tail_bound: Bound on the dropped tail over |z| <= R.
        certified: Whether the certificate holds for the stored coefficients.
        label: Human readable origin, used in reports.
    """

    coeffs: np.ndarray
    M: float
    A: float
    R: float
    tail_bound: float = 0.0
    certified: bool = True
    label: str = "coeffs"

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128).ravel()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        if not np.all(np.isfinite(coeffs)):
            msg = f"Taylor coefficients of {self.label} must be finite"
            raise ValueError(msg)
        if not self.M > 0:
            msg = f"certificate M must be positive, got {self.M}"
            raise ValueError(msg)
        if not 0 < self.A < 1:
            msg = f"certificate A must lie in (0, 1), got {self.A}"
            raise ValueError(msg)
        if not self.R > 1:
            msg = f"radius R must exceed 1, got {self.R}"
            raise ValueError(msg)
        if not self.tail_bound >= 0:
            msg = f"tail_bound must be nonnegative, got {self.tail_bound}"
            raise ValueError(msg)
        if self.A * self.R <= 1:
            logger.warning("Certificate of %s has A*R = %s <= 1", self.label, self.A * self.R)
        if self.certified:
            check = validate_decay(coeffs, self.M, self.A)
            if not check.valid:
                msg = (
                    f"Taylor coefficient c_{check.first_violation} of {self.label} breaks "
                    f"|c_p| <= M A^p/(2p)! with M={self.M}, A={self.A}"
                )
                raise CertificateViolationError(msg, check.first_violation)

    @property
    def degree(self) -> int:
        """Index of the last stored coefficient (-1 when nothing is stored)."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def is_constant(self) -> bool:
        return not np.any(self.coeffs[1:])

    def __call__(self, z):
        return eval_taylor(self, z)

    def __repr__(self) -> str:
        return (
            f"TaylorFunction(label={self.label!r}, N={self.degree}, M={self.M}, A={self.A}, R={self.R}, "
            f"certified={self.certified})"
        )


def eval_taylor(f: TaylorFunction, z):
    """Compensated sum of c_p z^p over the stored coefficients.

    Accepts a scalar or an array of points; the tail beyond the stored coefficients is bounded by
    ``f.tail_bound`` and not added.
    """
    points = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(points) > f.R * (1 + DECAY_SLACK)):
        msg = f"point(s) outside the disk |z| <= {f.R} of {f.label}"
        raise DomainError(msg)
    if f.coeffs.size == 0:
        values = np.zeros(points.shape, dtype=np.complex128)
    else:
        powers = points[..., np.newaxis] ** np.arange(f.coeffs.size)
        values = compensated_sum(powers * f.coeffs, axis=-1)
    return complex(values) if values.ndim == 0 else values


def derivative_coeffs(f: TaylorFunction, order: int) -> TaylorFunction:
    """Termwise derivative of the given order, with the certificate mapped (M, A) -> (M A/2, A) per order.

    (p+1) A^{p+1}/(2p+2)! <= (A/2) A^p/(2p)! makes the mapped certificate rigorous. An uncertified input
    stays uncertified.
    """
    if not 1 <= order <= MAX_DERIVATIVE_ORDER:
        msg = f"derivative order must be in 1..{MAX_DERIVATIVE_ORDER}, got {order}"
        raise ValueError(msg)
    stored = f.coeffs[order:]
    factors = np.array([math.perm(p + order, order) for p in range(stored.size)], dtype=np.float64)
    M = f.M * (f.A / 2) ** order
    tail = certificate_tail_bound(M, f.A, f.R, max(f.degree - order, -1)) if f.tail_bound > 0 else 0.0
    return TaylorFunction(
        coeffs=stored * factors,
        M=M,
        A=f.A,
        R=f.R,
        tail_bound=tail,
        certified=f.certified,
        label=f"{f.label}^({order})",
    )


def eval_taylor_derivative(f: TaylorFunction, z, order: int) -> ComplexValue:
    return eval_taylor(derivative_coeffs(f, order), z)
