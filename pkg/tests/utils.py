import mpmath
import numpy as np


def direct_series_moments(n: int, b_n: float, p_max: int, z: complex, dps: int = 50) -> list[complex]:
    """F_n(e_p; z) for p = 0..p_max from the defining Poisson series, summed in extended precision.

    The inner integrals use the Beta closed form (n+1) b^p n! (k+p)! / (k! (n+p+1)!), valid for every k.
    """
    with mpmath.workdps(dps):
        b = mpmath.mpf(b_n)
        w = n * mpmath.mpc(complex(z).real, complex(z).imag) / b
        k_last = int(3 * abs(complex(z)) * n / b_n) + 60 + p_max
        scales = [(n + 1) * b**p * mpmath.factorial(n) / mpmath.factorial(n + p + 1) for p in range(p_max + 1)]
        weight = mpmath.exp(-w)
        sums = [mpmath.mpc(0)] * (p_max + 1)
        for k in range(k_last + 1):
            if k:
                weight *= w / k
            for p in range(p_max + 1):
                sums[p] += weight * scales[p] * mpmath.rf(k + 1, p)
        return [complex(value) for value in sums]


def direct_series_value(coeffs: np.ndarray, n: int, b_n: float, z: complex, dps: int = 50) -> complex:
    """F_n(f; z) for the polynomial with the given Taylor coefficients, in extended precision."""
    moments = direct_series_moments(n, b_n, len(coeffs) - 1, z, dps)
    with mpmath.workdps(dps):
        total = mpmath.fsum(
            mpmath.mpc(complex(c).real, complex(c).imag) * mpmath.mpc(m.real, m.imag)
            for c, m in zip(coeffs, moments, strict=True)
        )
        return complex(total)
