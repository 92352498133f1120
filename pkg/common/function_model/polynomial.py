import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from common.types import ComplexValue


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    """Dense polynomial with complex coefficients in ascending degree.

    Canonical form: trailing exact zeros are dropped, so the zero polynomial has no coefficients and
    every other polynomial has a nonzero leading coefficient.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128).ravel()
        nonzero = np.flatnonzero(coeffs)
        coeffs = coeffs[: nonzero[-1] + 1] if nonzero.size else coeffs[:0]
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls) -> "ComplexPolynomial":
        return cls(np.zeros(0))

    @classmethod
    def one(cls) -> "ComplexPolynomial":
        return cls(np.ones(1))

    @classmethod
    def monomial(cls, p: int) -> "ComplexPolynomial":
        coeffs = np.zeros(p + 1)
        coeffs[p] = 1.0
        return cls(coeffs)

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self) -> ComplexValue:
        return complex(self.coeffs[-1]) if self.coeffs.size else 0j

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def __call__(self, z):
        if self.is_zero():
            return np.zeros_like(z, dtype=np.complex128) if np.ndim(z) else 0j
        value = npoly.polyval(z, self.coeffs)
        return complex(value) if np.ndim(value) == 0 else value

    def derivative(self, order: int = 1) -> "ComplexPolynomial":
        if order > self.degree:
            return self.zero()
        p = np.arange(order, len(self.coeffs))
        factors = np.array([math.perm(int(k), order) for k in p], dtype=np.float64)
        return ComplexPolynomial(self.coeffs[order:] * factors)

    def times_z(self) -> "ComplexPolynomial":
        return ComplexPolynomial(np.concatenate(([0j], self.coeffs)) if self.coeffs.size else self.coeffs)

    def __add__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        size = max(len(self.coeffs), len(other.coeffs))
        total = np.zeros(size, dtype=np.complex128)
        total[: len(self.coeffs)] += self.coeffs
        total[: len(other.coeffs)] += other.coeffs
        return ComplexPolynomial(total)

    def __neg__(self) -> "ComplexPolynomial":
        return ComplexPolynomial(-self.coeffs)

    def __sub__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return self + (-other)

    def __mul__(self, scalar: ComplexValue) -> "ComplexPolynomial":
        return ComplexPolynomial(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"ComplexPolynomial(degree={self.degree}, coeffs={self.coeffs.tolist()})"
