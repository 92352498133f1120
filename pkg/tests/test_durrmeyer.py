import math

import numpy as np
import pytest

from common.durrmeyer import (
    apply,
    apply_derivative,
    apply_direct,
    apply_direct_with_condition,
    apply_tail_bound,
    residual,
    series_growth_factor,
    truncation_error_bound,
    upper_constant,
    voronovskaja_constant,
    voronovskaja_tail_bound,
    voronovskaja_term,
)
from common.exceptions import ConditioningError, DivergenceError, DomainError
from common.function_model import TaylorFunction, load_function
from common.types import OperatorConfig
from tests.utils import direct_series_value

POINTS = np.array([0, 0.8, -1.5 + 0.5j, 1.2j, 0.9 - 0.9j])


def test_constant_is_reproduced_exactly(monomial, sqrt_config):
    values = apply(monomial(0), sqrt_config(25), POINTS)
    np.testing.assert_array_equal(values, np.ones(POINTS.shape))


def test_first_monomial(monomial, sqrt_config):
    cfg = sqrt_config(25)
    expected = (cfg.n * POINTS + cfg.b_n) / (cfg.n + 2)
    np.testing.assert_allclose(apply(monomial(1), cfg, POINTS), expected, rtol=1e-14, atol=1e-16)


def test_scalar_points_give_scalars(cosh_sqrt, sqrt_config):
    assert isinstance(apply(cosh_sqrt, sqrt_config(16), 0.5j), complex)


def test_linearity(cosh_sqrt, sqrt_config):
    cfg = sqrt_config(40)
    polynomial = load_function({"preset": "polynomial", "coeffs": [1, -2, 0.5], "A": 0.2})
    alpha, beta = 2 - 1j, 0.5j
    size = max(cosh_sqrt.coeffs.size, polynomial.coeffs.size)
    combined = alpha * np.pad(cosh_sqrt.coeffs, (0, size - cosh_sqrt.coeffs.size)) + beta * np.pad(
        polynomial.coeffs, (0, size - polynomial.coeffs.size)
    )
    h = TaylorFunction(coeffs=combined, M=10.0, A=0.2, R=10.0, certified=False)
    expected = alpha * apply(cosh_sqrt, cfg, POINTS) + beta * apply(polynomial, cfg, POINTS)
    np.testing.assert_allclose(apply(h, cfg, POINTS), expected, rtol=1e-12)


def test_real_inputs_give_real_values(cosh_sqrt, sqrt_config):
    cfg = sqrt_config(9)
    x = np.linspace(0, min(cfg.b_n, cosh_sqrt.R), 11)
    assert np.all(np.asarray(apply(cosh_sqrt, cfg, x)).imag == 0)


def test_domain_is_checked(cosh_sqrt):
    cfg = OperatorConfig(n=4, bn_rule="sqrt")
    with pytest.raises(DomainError):
        apply(cosh_sqrt, cfg, 3.0)
    with pytest.raises(DomainError):
        apply(cosh_sqrt, cfg, 20j)
    with pytest.raises(DomainError):
        apply_direct(cosh_sqrt, cfg, 3.0)


@pytest.mark.parametrize("z", [0, 0.8, 1.2j, 0.9 - 0.9j])
def test_direct_operator_on_the_constant(monomial, sqrt_config, z):
    value, condition = apply_direct_with_condition(monomial(0), sqrt_config(12), z)
    assert value == pytest.approx(1, abs=1e-12)
    assert condition >= abs(value)


def test_direct_operator_at_the_origin(monomial):
    cfg = OperatorConfig(n=4, bn_rule=2.0)
    assert apply_direct(monomial(1), cfg, 0) == pytest.approx(1 / 3, rel=1e-13)


@pytest.mark.parametrize("n", [5, 10, 25, 50, 100])
@pytest.mark.parametrize("z", [0.5, 1 + 1j, 1.5 - 0.3j])
def test_direct_operator_agrees_with_the_moment_table(cosh_sqrt, sqrt_config, n, z):
    cfg = sqrt_config(n)
    by_moments = apply(cosh_sqrt, cfg, z)
    assert abs(apply_direct(cosh_sqrt, cfg, z) - by_moments) <= 1e-8 * (1 + abs(by_moments))


@pytest.mark.parametrize("n", [10, 25, 50, 100])
@pytest.mark.parametrize("z", [-1.8, -1.2 + 0.9j])
def test_moment_table_agrees_with_the_extended_precision_series(cosh_sqrt, sqrt_config, n, z):
    cfg = sqrt_config(n)
    expected = direct_series_value(cosh_sqrt.coeffs, n, cfg.b_n, z)
    by_moments = apply(cosh_sqrt, cfg, z)
    assert abs(by_moments - expected) <= 1e-8 * (1 + abs(expected))


@pytest.mark.parametrize("n", [50, 100])
def test_direct_operator_refuses_a_cancelling_series(cosh_sqrt, sqrt_config, n):
    cfg = sqrt_config(n)
    assert series_growth_factor(cfg, -1.8) > 1e10
    with pytest.raises(ConditioningError, match="Poisson growth"):
        apply_direct(cosh_sqrt, cfg, -1.8)
    with pytest.raises(ConditioningError):
        apply_direct_with_condition(cosh_sqrt, cfg, -1.8)


def test_direct_operator_on_the_constant_refuses_the_left_half_plane(monomial, sqrt_config):
    with pytest.raises(ConditioningError):
        apply_direct(monomial(0), sqrt_config(12), -1.5 + 0.5j)


@pytest.mark.parametrize("n", [36, 64, 100])
@pytest.mark.parametrize("degree", [2, 5])
def test_direct_operator_handles_b_n_beyond_the_radius(monomial, n, degree):
    # b_n = sqrt(n) is past R = 5, so the inner integrals run past the disk of e_p
    cfg = OperatorConfig(n=n, bn_rule="sqrt")
    f = monomial(degree)
    assert apply_direct(f, cfg, 0.5) == pytest.approx(apply(f, cfg, 0.5), rel=1e-10)


def test_first_moment_residual_vanishes(monomial, sqrt_config):
    cfg = sqrt_config(30)
    np.testing.assert_allclose(residual(monomial(1), cfg, POINTS), 0, atol=1e-13)
    np.testing.assert_array_equal(residual(monomial(0), cfg, POINTS), np.zeros(POINTS.shape))


def test_voronovskaja_term_of_monomials(monomial, sqrt_config):
    cfg = sqrt_config(30)
    n, b_n = cfg.n, cfg.b_n
    np.testing.assert_allclose(voronovskaja_term(monomial(1), cfg, POINTS), (b_n - 2 * POINTS) / (n + 2))
    np.testing.assert_allclose(
        voronovskaja_term(monomial(2), cfg, POINTS), (4 * b_n * POINTS - 5 * POINTS**2) / (n + 2), atol=1e-15
    )
    np.testing.assert_array_equal(voronovskaja_term(monomial(0), cfg, POINTS), np.zeros(POINTS.shape))


def test_second_moment_residual(monomial, sqrt_config):
    cfg = sqrt_config(30)
    n, b_n = cfg.n, cfg.b_n
    expected = (2 * b_n**2 - 12 * b_n * POINTS + 9 * POINTS**2) / ((n + 2) * (n + 3))
    np.testing.assert_allclose(residual(monomial(2), cfg, POINTS), expected, rtol=1e-10, atol=1e-15)


def test_derivative_of_the_second_moment(monomial, sqrt_config):
    cfg = sqrt_config(30)
    n, b_n = cfg.n, cfg.b_n
    expected = (2 * n**2 * POINTS + 4 * n * b_n) / ((n + 2) * (n + 3))
    np.testing.assert_allclose(apply_derivative(monomial(2), cfg, POINTS, 1), expected, rtol=1e-13)
    np.testing.assert_array_equal(apply_derivative(monomial(1), cfg, POINTS, 2), np.zeros(POINTS.shape))


def test_tail_bounds(cosh_sqrt, monomial, sqrt_config):
    cfg = sqrt_config(30)
    assert apply_tail_bound(monomial(3), cfg, 1.0) == 0
    assert 0 < apply_tail_bound(cosh_sqrt, cfg, 1.0) < 1e-11
    assert apply_tail_bound(cosh_sqrt, cfg, 5.0) == math.inf


def test_truncation_error_bounds(cosh_sqrt, monomial, sqrt_config):
    cfg = sqrt_config(30)
    assert truncation_error_bound(monomial(3), cfg, 1.0) == 0
    assert voronovskaja_tail_bound(monomial(3), cfg, 1.0) == 0
    operator_tail = apply_tail_bound(cosh_sqrt, cfg, 1.0)
    truncation = truncation_error_bound(cosh_sqrt, cfg, 1.0)
    assert operator_tail <= truncation < 2 * operator_tail
    assert truncation <= voronovskaja_tail_bound(cosh_sqrt, cfg, 1.0) < 1e-11
    assert truncation_error_bound(cosh_sqrt, cfg, 5.0) == math.inf
    assert voronovskaja_tail_bound(cosh_sqrt, cfg, 5.0) == math.inf


def test_series_growth_factor(sqrt_config):
    cfg = sqrt_config(16)
    assert series_growth_factor(cfg, 1.5) == 1
    assert series_growth_factor(cfg, -1.0) == pytest.approx(math.exp(8))


@pytest.mark.parametrize(
    ("M", "A", "r", "expected"),
    [
        (1.0, 0.4, 1.0, 2 / 3),
        (2.0, 0.2, 2.0, 4 / 3),
        (3.0, 0.5, 1.0, 3.0),
    ],
)
def test_upper_constant(M, A, r, expected):
    assert upper_constant(M, A, r) == pytest.approx(expected, rel=1e-14)


def test_voronovskaja_constant():
    assert voronovskaja_constant(1.0, 0.4, 1.0) == pytest.approx(8.0823, abs=1e-3)
    assert voronovskaja_constant(1.0, 0.2, 1.0) < voronovskaja_constant(1.0, 0.3, 1.0)
    assert voronovskaja_constant(2.0, 0.4, 1.0) == pytest.approx(2 * voronovskaja_constant(1.0, 0.4, 1.0))


@pytest.mark.parametrize("constant", [upper_constant, voronovskaja_constant])
def test_constants_diverge_at_the_certificate_radius(constant):
    with pytest.raises(DivergenceError):
        constant(1.0, 0.5, 2.0)
    with pytest.raises(DivergenceError):
        constant(1.0, 0.9, 1.5)
