import math

import numpy as np
import pytest

from common.analysis import (
    CauchyDerivative,
    bernstein_inequality_check,
    bernstein_ratio,
    cauchy_derivative,
    check_radii,
    convergence_row,
    derivative_error_bound,
    derivative_row,
    disk_sup_norm,
    find_n_star,
    fit_order,
    lower_bound_constant,
    lower_order_functional,
    reference_slope,
    running_slopes,
    voronovskaja_reference_slope,
    voronovskaja_row,
)
from common.durrmeyer import (
    apply,
    apply_derivative,
    truncation_error_bound,
    upper_constant,
    voronovskaja_constant,
)
from common.exceptions import DegenerateDataError, GeometryError, PointOnContourError
from common.function_model import ComplexPolynomial, TaylorFunction, load_function
from common.types import ContourSpec, ConvergenceRecord, OperatorConfig


def _records(ns, errors, ratios=None, b_n=None):
    ratios = ratios or [1.0] * len(ns)
    return [
        ConvergenceRecord(
            n=n,
            b_n=math.sqrt(n) if b_n is None else b_n,
            error=error,
            bound=1.0,
            ratio=ratio,
        )
        for n, error, ratio in zip(ns, errors, ratios, strict=True)
    ]


@pytest.mark.parametrize("p", [1, 3, 7])
def test_sup_norm_of_monomials(p):
    assert disk_sup_norm(ComplexPolynomial.monomial(p), 1.5) == pytest.approx(1.5**p, rel=1e-12)


def test_sup_norm_of_a_constant():
    assert disk_sup_norm(ComplexPolynomial([2 + 1j]), 3.0) == pytest.approx(math.sqrt(5), rel=1e-15)


def test_sup_norm_refines_between_samples():
    # the maximum of |z - e^{i t}| on |z| = 1 sits at the antipode of e^{i t}
    t = 0.01
    g = ComplexPolynomial([-np.exp(1j * t), 1])
    assert disk_sup_norm(g, 1.0, samples=64) == pytest.approx(2, rel=1e-12)


def test_sup_norm_needs_enough_samples():
    with pytest.raises(ValueError):
        disk_sup_norm(ComplexPolynomial.one(), 1.0, samples=32)


def test_cauchy_derivative_of_polynomials():
    contour = ContourSpec(radius=2.0)
    square = ComplexPolynomial.monomial(2)
    assert cauchy_derivative(square, 1, 0.5, contour) == pytest.approx(1.0, abs=1e-12)
    assert cauchy_derivative(square, 2, -0.3j, contour) == pytest.approx(2.0, abs=1e-12)
    assert abs(cauchy_derivative(ComplexPolynomial([4 - 1j]), 1, 0.2, contour)) < 1e-12


def test_cauchy_derivative_of_the_operator(cosh_sqrt, sqrt_config):
    cfg = sqrt_config(50)
    contour = ContourSpec(radius=2.0)
    z = 0.3 + 0.2j
    value = cauchy_derivative(lambda nu: apply(cosh_sqrt, cfg, nu), 1, z, contour)
    assert value == pytest.approx(apply_derivative(cosh_sqrt, cfg, z, 1), abs=1e-9)


def test_cauchy_derivative_evaluates_arrays():
    contour = ContourSpec(radius=2.0)
    points = np.array([0.1, -0.5j, 1.2 + 0.3j])
    derivative = CauchyDerivative.build(ComplexPolynomial.monomial(3), 1, contour, points)
    np.testing.assert_allclose(derivative(points), 3 * points**2, atol=1e-12)


def test_cauchy_derivative_rejects_points_on_the_contour():
    contour = ContourSpec(radius=1.0)
    with pytest.raises(PointOnContourError):
        cauchy_derivative(ComplexPolynomial.one(), 1, 1.0, contour)
    with pytest.raises(ValueError):
        cauchy_derivative(ComplexPolynomial.one(), 0, 0.0, contour)


def test_derivative_error_bound():
    assert derivative_error_bound(1, 1.5, 2.0, 2 / 3, 48, math.sqrt(48)) == pytest.approx(0.8457, rel=1e-3)
    assert derivative_error_bound(1, 1.5, 1.5001, 2 / 3, 48, math.sqrt(48)) > 1e6


@pytest.mark.parametrize(("r", "r1"), [(2.0, 1.5), (1.5, 1.5), (0.5, 2.0)])
def test_radii_must_be_ordered(r, r1):
    with pytest.raises(GeometryError):
        check_radii(r, r1)


def test_lower_order_functional(monomial, cosh_sqrt, sqrt_config):
    cfg = sqrt_config(50)
    assert lower_order_functional(monomial(1), cfg, 1.0) == pytest.approx(1 + 2 / cfg.b_n, rel=1e-12)
    assert lower_order_functional(monomial(0), cfg, 1.0) == 0
    assert lower_order_functional(cosh_sqrt, cfg, 1.0) > 0
    assert lower_order_functional(monomial(1), cfg, 1.0, derivative_order=1) == pytest.approx(2 / cfg.b_n)


@pytest.mark.parametrize("p", range(1, 11))
def test_bernstein_equality_for_monomials(p):
    assert bernstein_ratio(ComplexPolynomial.monomial(p), 1.3) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("degree", range(1, 11))
def test_bernstein_inequality_on_random_polynomials(degree):
    rng = np.random.default_rng(degree)
    for _ in range(100):
        coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        coeffs[0] = 0
        assert bernstein_inequality_check(ComplexPolynomial(coeffs), 1.0)


def test_bernstein_needs_a_non_constant_polynomial():
    with pytest.raises(ValueError):
        bernstein_ratio(ComplexPolynomial([3]), 1.0)


def test_fit_order_recovers_a_power_law():
    ns = [8, 16, 32, 64, 128, 256]
    fit = fit_order(_records(ns, [3 * n**-0.5 for n in ns], ratios=[1.0, 2.0, 1.5, 1.5, 1.2, 1.1]))
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3), abs=1e-12)
    assert fit.ratio_window == pytest.approx(2.0)


def test_fit_order_of_a_constant_error():
    ns = [8, 16, 32, 64, 128]
    assert fit_order(_records(ns, [0.25] * 5)).slope == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize(
    ("ns", "errors"),
    [
        ([8, 16, 32, 64], [1.0, 0.5, 0.25, 0.125]),
        ([8, 16, 16, 32, 64], [1.0, 0.5, 0.5, 0.25, 0.125]),
        ([8, 16, 32, 64, 128], [1.0, 0.5, 0.0, 0.25, 0.125]),
    ],
)
def test_fit_order_rejects_degenerate_data(ns, errors):
    with pytest.raises(DegenerateDataError):
        fit_order(_records(ns, errors))


def test_reference_slope():
    records = _records([8, 16, 32, 64, 128, 256, 512], [1.0] * 7)
    slope = reference_slope(records)
    assert -0.53 < slope < -0.5
    assert reference_slope(records, power=2) == pytest.approx(2 * slope)


def test_running_slopes():
    slopes = running_slopes(_records([8, 16, 32], [1.0, 0.5, 0.25]))
    assert slopes[0] is None
    assert slopes[1] == pytest.approx(-1)
    assert slopes[2] == pytest.approx(-1)


def test_convergence_row_of_the_first_monomial(monomial, sqrt_config):
    cfg = sqrt_config(64)
    record = convergence_row(monomial(1), cfg, 1.0)
    assert record.error == pytest.approx((cfg.b_n + 2) / (cfg.n + 2), rel=1e-9)
    assert record.bound == pytest.approx(upper_constant(5.0, 0.4, 1.0) * cfg.rate)
    assert record.ratio == pytest.approx(record.error / cfg.rate)
    assert record.checked
    assert record.passed


def test_rows_below_n0_are_not_checked(cosh_sqrt, sqrt_config):
    record = convergence_row(cosh_sqrt, sqrt_config(2), 1.0, n0=4)
    assert not record.checked
    assert record.passed


def test_voronovskaja_row_of_the_first_monomial_is_exact(monomial, sqrt_config):
    record = voronovskaja_row(monomial(1), sqrt_config(32), 1.0)
    assert record.exact
    assert record.passed


def test_voronovskaja_row_of_cosh_sqrt(cosh_sqrt, sqrt_config):
    cfg = sqrt_config(64)
    record = voronovskaja_row(cosh_sqrt, cfg, 1.0)
    assert not record.exact
    assert record.bound == pytest.approx(voronovskaja_constant(1.0, 0.2, 1.0) * cfg.rate**2)
    assert record.ratio == pytest.approx(record.error / cfg.rate**2)
    assert record.passed


def test_derivative_row_stays_under_its_bound(cosh_sqrt, sqrt_config):
    record = derivative_row(cosh_sqrt, sqrt_config(16), 1.5, 2.0, 1)
    assert record.derivative_order == 1
    assert 0 < record.error <= record.bound


def test_find_n_star(monomial):
    f = monomial(1)
    n_star = find_n_star(f, "sqrt", 1.0)
    constant = voronovskaja_constant(f.M, f.A, 1.0)

    def holds(n):
        cfg = OperatorConfig(n=n, bn_rule="sqrt")
        return cfg.rate * constant <= 0.5 * (1 + 2 / cfg.b_n)

    assert n_star is not None
    assert holds(n_star)
    assert not holds(n_star - 1)


def test_find_n_star_beyond_the_cap(cosh_sqrt):
    assert find_n_star(cosh_sqrt, "sqrt", 1.0, n_cap=512) is None


def test_lower_bound_constant():
    records = _records([8, 16, 32], [1.0, 1.0, 1.0], ratios=[0.9, 0.7, 0.8])
    assert lower_bound_constant(records, 4.0, n_star=None) == 0.7
    assert lower_bound_constant(records, 4.0, n_star=16) == 0.9
    assert lower_bound_constant(records, 1.0, n_star=8) == 0.5


def test_lower_order_functional_needs_a_nonzero_function(sqrt_config):
    zero = TaylorFunction(coeffs=[0, 0, 0], M=1.0, A=0.5, R=4.0)
    with pytest.raises(DegenerateDataError):
        lower_order_functional(zero, sqrt_config(16), 1.0)


@pytest.mark.parametrize("rule", ["sqrt", "pow23"])
def test_voronovskaja_reference_slope_of_the_first_monomial(monomial, rule):
    ns = [8, 16, 32, 64, 128, 256, 512]
    records = _records(ns, [1.0] * len(ns))
    # b_n/(n+2) times the derivative 2/b_n of the Voronovskaja polynomial of e_1
    expected, _ = np.polyfit(np.log(ns), np.log([2 / (n + 2) for n in ns]), 1)
    slope = voronovskaja_reference_slope(monomial(1), records, rule, 1.5, derivative_order=1)
    assert slope == pytest.approx(expected, rel=1e-9)


def test_voronovskaja_reference_slope_follows_the_competing_terms(cosh_sqrt):
    ns = [8, 16, 32, 64, 128, 256, 512]
    records = _records(ns, [1.0] * len(ns))
    first = voronovskaja_reference_slope(cosh_sqrt, records, "sqrt", 1.5, derivative_order=1)
    assert -1.3 < first < -1.1
    assert voronovskaja_reference_slope(cosh_sqrt, records, "sqrt", 1.5, derivative_order=2) == pytest.approx(
        -1.0, abs=0.1
    )


def test_voronovskaja_reference_slope_needs_a_nonvanishing_term(monomial):
    records = _records([8, 16, 32, 64, 128], [1.0] * 5)
    with pytest.raises(DegenerateDataError):
        voronovskaja_reference_slope(monomial(1), records, "sqrt", 1.0, derivative_order=2)


def test_rows_carry_the_truncation_tail(cosh_sqrt, monomial, sqrt_config):
    cfg = sqrt_config(64)
    assert convergence_row(monomial(3), cfg, 1.0).tail == 0
    record = convergence_row(cosh_sqrt, cfg, 2.0)
    assert record.tail == pytest.approx(truncation_error_bound(cosh_sqrt, cfg, 2.0))
    assert 0 < record.tail < 1e-6
    assert voronovskaja_row(cosh_sqrt, cfg, 2.0).tail >= record.tail
    derivative = derivative_row(cosh_sqrt, sqrt_config(16), 1.5, 2.0, 2)
    assert derivative.tail == pytest.approx(2 * 2.0 / 0.5**3 * truncation_error_bound(cosh_sqrt, sqrt_config(16), 2.0))


def test_uncertified_tails_fail_every_checked_row(sqrt_config):
    f = load_function({"preset": "exp_uncertified"}, allow_uncertified=True)
    record = convergence_row(f, sqrt_config(32), 1.0)
    assert record.tail == math.inf
    assert not record.passed


def test_a_row_passes_only_with_its_tail_under_the_bound():
    record = ConvergenceRecord(n=8, b_n=2.0, error=0.5, bound=1.0, ratio=1.0, tail=0.6)
    assert not record.passed
    assert record.model_copy(update={"tail": 0.4}).passed


@pytest.mark.parametrize(
    "document",
    [
        {"preset": "cosh_sqrt", "A": 0.2},
        {"preset": "monomial", "degree": 3},
        {"preset": "polynomial", "coeffs": [1, -2, 0.5]},
    ],
)
@pytest.mark.parametrize("rule", ["sqrt", "pow23"])
@pytest.mark.parametrize("r", [1.0, 2.0])
@pytest.mark.parametrize("n", [4, 8, 32, 128, 512])
def test_rows_stay_under_their_bounds(document, rule, r, n):
    f = load_function(document)
    cfg = OperatorConfig(n=n, bn_rule=rule)
    for row in (convergence_row, voronovskaja_row):
        record = row(f, cfg, r)
        assert record.checked
        assert record.error + record.tail <= record.bound, (row.__name__, record)
