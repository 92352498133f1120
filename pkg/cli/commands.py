import logging
import math
from collections.abc import Callable

import numpy as np

from cli.config import ExperimentConfig
from cli.reports import MOMENT_COLUMNS, Assertion, SuiteReport, write_rows, write_sweep_csv
from common.analysis import (
    BERNSTEIN_SLACK,
    bernstein_ratio,
    check_radii,
    disk_sup_norm,
    find_n_star,
    fit_order,
    lower_bound_constant,
    lower_order_functional,
    reference_slope,
    running_slopes,
    voronovskaja_reference_slope,
)
from common.bn_rules import get_bn_rule
from common.durrmeyer import upper_constant
from common.exceptions import CertificateViolationError, ConditioningError, DegenerateDataError, GeometryError
from common.function_model import ComplexPolynomial, TaylorFunction, load_function
from common.moments import moment_direct, moment_error_bound, moment_recurrence
from common.settings import get_settings, get_structured_logger
from common.types import ConvergenceRecord, OperatorConfig, SweepKind
from worker.sweep_service import SweepService

logger = logging.getLogger(__name__)
structured_logger = get_structured_logger()
settings = get_settings()

ORACLE_POINTS = 64
ORACLE_RTOL = 1e-9
LEADING_RTOL = 1e-12
BOUND_SLACK = 1e-9
BERNSTEIN_DEGREES = range(1, 11)
BERNSTEIN_TRIALS = 100
NEGATIVE_CONTROL_R = 1.0
# ratios are taken against (b_n+1)/(n+2) while the Voronovskaja term carries b_n/(n+2)
FLOOR_FRACTION = 0.25

BERNSTEIN_COLUMNS = ["degree", "trials", "failures", "worst_ratio"]


def _bound_assertion(records: list[ConvergenceRecord]) -> Assertion:
    failed = [record.n for record in records if not record.passed]
    checked = sum(record.checked for record in records)
    if failed:
        return Assertion(passed=False, detail=f"error plus truncation tail exceeds bound at n={failed}")
    return Assertion(passed=True, detail=f"{checked} checked rows within bound, truncation tail included")


def _tail_max(records: list[ConvergenceRecord]) -> float:
    return max(record.tail for record in records)


def _reject_constant(f: TaylorFunction, suite: str) -> None:
    if f.is_constant():
        msg = f"{suite} needs a non-constant function: {f.label} is reproduced exactly, so no order can be fitted"
        raise DegenerateDataError(msg)


def _write_sweep(cfg: ExperimentConfig, name: str, records: list[ConvergenceRecord]) -> str:
    csv_file = f"{name}.csv"
    write_sweep_csv(cfg.out / csv_file, records, running_slopes(records))
    return csv_file


def _order_assertions(
    report: SuiteReport,
    records: list[ConvergenceRecord],
    power: int,
    tolerance: float,
    window: bool,
    reference_of: Callable[[list[ConvergenceRecord]], float] | None = None,
) -> None:
    checked = [record for record in records if record.checked]
    fit = fit_order(checked)
    reference = reference_slope(checked, power=power) if reference_of is None else reference_of(checked)
    report.metrics.update(
        {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "reference_slope": reference,
            "rate_slope": reference_slope(checked, power=power),
            "ratio_min": fit.ratio_min,
            "ratio_max": fit.ratio_max,
            "ratio_window": fit.ratio_window,
        }
    )
    report.assertions["order_slope"] = Assertion(
        passed=abs(fit.slope - reference) <= tolerance,
        detail=f"fitted slope {fit.slope:.6f} against reference {reference:.6f} within {tolerance}",
    )
    if window:
        report.assertions["ratio_window"] = Assertion(
            passed=0 < fit.ratio_min and fit.ratio_window <= settings.ORDER_WINDOW,
            detail=f"ratio in [{fit.ratio_min:.6g}, {fit.ratio_max:.6g}], window {fit.ratio_window:.6g}",
        )


def _load(cfg: ExperimentConfig) -> TaylorFunction:
    return load_function(cfg.function_document(), allow_uncertified=cfg.allow_uncertified)


def cmd_moments(cfg: ExperimentConfig) -> SuiteReport:
    """Moment table by recurrence, checked against the direct series and the moment bound."""
    rule = get_bn_rule(cfg.bn_rule)
    rule.check_admissible([cfg.n])
    b_n = rule(cfg.n)
    table = moment_recurrence(cfg.n, b_n, cfg.p_max)
    points = cfg.r * np.exp(2j * np.pi * np.arange(ORACLE_POINTS) / ORACLE_POINTS)

    rows = []
    oracle_failures, shape_failures, bound_failures = [], [], []
    cancelling = 0
    for p, poly in enumerate(table.polys):
        deltas = []
        for z in points:
            try:
                direct = moment_direct(cfg.n, b_n, p, z, cfg.tol)
            except ConditioningError:
                cancelling += 1
                continue
            delta = abs(poly(z) - direct)
            if delta > ORACLE_RTOL * (1 + abs(direct)):
                oracle_failures.append((p, complex(z)))
            deltas.append(delta / (1 + abs(direct)))
        expected_leading = table.leading_coefficient_expected(p)
        if poly.degree != p or abs(poly.leading_coefficient - expected_leading) > LEADING_RTOL * expected_leading:
            shape_failures.append(p)
        deviation = disk_sup_norm(lambda z, poly=poly, p=p: poly(z) - z**p, cfg.r)
        bound = moment_error_bound(cfg.n, b_n, p, cfg.r) if p else 0.0
        if p and cfg.n >= cfg.n0 and deviation > bound * (1 + BOUND_SLACK):
            bound_failures.append(p)
        worst = max(deltas, default=math.nan)
        rows.append([p, poly.degree, poly.leading_coefficient.real, worst, deviation, bound, bound - deviation])

    checked = len(table.polys) * ORACLE_POINTS - cancelling
    if cancelling:
        logger.info("%s of %s oracle points cancel past double precision, skipped", cancelling, checked + cancelling)
    write_rows(cfg.out / "moments.csv", MOMENT_COLUMNS, rows)
    return SuiteReport(
        name="moments",
        csv_file="moments.csv",
        assertions={
            "oracle_equivalence": Assertion(
                passed=checked > 0 and not oracle_failures,
                detail=(
                    f"{len(oracle_failures)} disagreeing (p, z) pairs of {checked} checked, "
                    f"{cancelling} skipped as cancelling"
                ),
            ),
            "degree_and_leading_coefficient": Assertion(
                passed=not shape_failures, detail=f"failing p={shape_failures}"
            ),
            "moment_bound": Assertion(passed=not bound_failures, detail=f"failing p={bound_failures}"),
        },
        metrics={
            "n": cfg.n,
            "b_n": b_n,
            "p_max": cfg.p_max,
            "r": cfg.r,
            "oracle_points_checked": checked,
            "oracle_points_cancelling": cancelling,
        },
    )


def cmd_converge(cfg: ExperimentConfig) -> SuiteReport:
    """Upper bound on every row, order fit, ratio window and the lower-bound floor past n*."""
    f = _load(cfg)
    _reject_constant(f, "converge")
    records = SweepService(cfg.workers).run(SweepKind.CONVERGE, f, cfg.n_range.grid(), cfg.bn_rule, cfg.r, n0=cfg.n0)
    report = SuiteReport(
        name="converge",
        csv_file=_write_sweep(cfg, "converge", records),
        assertions={"bound_rows": _bound_assertion(records)},
        metrics={"function": f.label, "certified": f.certified, "r": cfg.r, "tail_max": _tail_max(records)},
    )
    _order_assertions(report, records, power=1, tolerance=settings.SLOPE_TOLERANCE, window=True)

    n_star = find_n_star(f, cfg.bn_rule, cfg.r, cfg.n0)
    floor_failures, floor_rows = [], 0
    for record in records:
        if n_star is not None and record.n >= n_star:
            floor_rows += 1
            functional = lower_order_functional(f, OperatorConfig(n=record.n, bn_rule=cfg.bn_rule), cfg.r)
            if record.ratio < FLOOR_FRACTION * functional:
                floor_failures.append(record.n)
    last = OperatorConfig(n=records[-1].n, bn_rule=cfg.bn_rule)
    functional = lower_order_functional(f, last, cfg.r)
    report.metrics.update(
        {
            "n_star": n_star,
            "floor_rows": floor_rows,
            "lower_functional": functional,
            "lower_bound_constant": lower_bound_constant(records, functional, n_star),
        }
    )
    report.assertions["lower_bound_floor"] = Assertion(
        passed=not floor_failures,
        detail=f"ratio >= {FLOOR_FRACTION} * functional on rows n >= n*={n_star}; failing n={floor_failures}",
    )
    return report


def cmd_voronovskaja(cfg: ExperimentConfig) -> SuiteReport:
    """Residual bound on every row and the squared-rate order fit; identically vanishing residuals are exact."""
    f = _load(cfg)
    records = SweepService(cfg.workers).run(
        SweepKind.VORONOVSKAJA, f, cfg.n_range.grid(), cfg.bn_rule, cfg.r, n0=cfg.n0
    )
    report = SuiteReport(
        name="voronovskaja",
        csv_file=_write_sweep(cfg, "voronovskaja", records),
        assertions={"bound_rows": _bound_assertion(records)},
        metrics={
            "function": f.label,
            "certified": f.certified,
            "r": cfg.r,
            "tail_max": _tail_max(records),
            "alpha_last": OperatorConfig(n=records[-1].n, bn_rule=cfg.bn_rule).alpha,
        },
    )
    if all(record.exact for record in records if record.checked):
        report.metrics["exact"] = True
        report.assertions["exact_cancellation"] = Assertion(passed=True, detail="residual vanishes on every row")
        return report
    report.metrics["exact"] = False
    _order_assertions(report, records, power=2, tolerance=settings.VORONOVSKAJA_SLOPE_TOLERANCE, window=False)
    return report


def cmd_derivative(cfg: ExperimentConfig, order: int | None = None) -> SuiteReport:
    """Cauchy-derivative errors against their bound, with the same order criteria as the plain sweep."""
    order = cfg.derivative_order if order is None else order
    f = _load(cfg)
    _reject_constant(f, f"derivative of order {order}")
    check_radii(cfg.r, cfg.r1)
    if cfg.r1 >= f.R:
        msg = f"the contour radius r1={cfg.r1} must be inside the disk of radius R={f.R}"
        raise GeometryError(msg)
    # C_{r1,A} must be finite: raises DivergenceError unless A r1 < 1
    upper_constant(f.M, f.A, cfg.r1)
    ns = cfg.n_range.grid()
    if get_bn_rule(cfg.bn_rule)(ns[0]) < cfg.r1:
        msg = f"the contour |nu| = {cfg.r1} needs b_n >= r1 from the first n={ns[0]}"
        raise GeometryError(msg)

    name = f"derivative_p{order}"
    records = SweepService(cfg.workers).run(
        SweepKind.DERIVATIVE, f, ns, cfg.bn_rule, cfg.r, r1=cfg.r1, order=order, n0=cfg.n0
    )
    report = SuiteReport(
        name=name,
        csv_file=_write_sweep(cfg, name, records),
        assertions={"bound_rows": _bound_assertion(records)},
        metrics={
            "function": f.label,
            "certified": f.certified,
            "order": order,
            "r": cfg.r,
            "r1": cfg.r1,
            "tail_max": _tail_max(records),
            "lower_functional": lower_order_functional(
                f, OperatorConfig(n=ns[-1], bn_rule=cfg.bn_rule), cfg.r, derivative_order=order
            ),
        },
    )
    _order_assertions(
        report,
        records,
        power=1,
        tolerance=settings.SLOPE_TOLERANCE,
        window=True,
        reference_of=lambda rows: voronovskaja_reference_slope(f, rows, cfg.bn_rule, cfg.r, derivative_order=order),
    )
    return report


def cmd_bernstein(cfg: ExperimentConfig) -> SuiteReport:
    """Bernstein's inequality on seeded random polynomials without constant term."""
    rng = np.random.default_rng(cfg.seed)
    rows = []
    failures = 0
    for degree in BERNSTEIN_DEGREES:
        ratios = []
        for _ in range(BERNSTEIN_TRIALS):
            coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
            coeffs[0] = 0
            ratios.append(bernstein_ratio(ComplexPolynomial(coeffs), cfg.r))
        degree_failures = sum(ratio > 1 + BERNSTEIN_SLACK for ratio in ratios)
        failures += degree_failures
        rows.append([degree, BERNSTEIN_TRIALS, degree_failures, max(ratios)])
    write_rows(cfg.out / "bernstein.csv", BERNSTEIN_COLUMNS, rows)
    return SuiteReport(
        name="bernstein",
        csv_file="bernstein.csv",
        assertions={"bernstein_inequality": Assertion(passed=not failures, detail=f"{failures} failing polynomials")},
        metrics={"seed": cfg.seed, "r": cfg.r},
    )


def cmd_negative_control(cfg: ExperimentConfig) -> SuiteReport:
    """exp(z) is rejected without the override and, with it, still gets its bound rows reported."""
    document = {"preset": "exp_uncertified"}
    try:
        load_function(document)
        rejected, violation = False, None
    except CertificateViolationError as e:
        rejected, violation = True, e.index
    f = load_function(document, allow_uncertified=True)
    records = SweepService(cfg.workers).run(
        SweepKind.CONVERGE, f, cfg.n_range.grid(), cfg.bn_rule, NEGATIVE_CONTROL_R, n0=cfg.n0
    )
    return SuiteReport(
        name="negative_control",
        csv_file=_write_sweep(cfg, "negative_control", records),
        assertions={
            "rejected_without_override": Assertion(passed=rejected, detail=f"first violating index {violation}"),
            "rows_reported": Assertion(
                passed=bool(records),
                detail=f"{len(records)} rows, {sum(not record.passed for record in records)} over their bound",
            ),
        },
        metrics={"first_violation": violation, "r": NEGATIVE_CONTROL_R, "tail_max": _tail_max(records)},
    )


def cmd_verify_all(cfg: ExperimentConfig) -> list[SuiteReport]:
    reports = [
        cmd_moments(cfg),
        cmd_converge(cfg),
        cmd_voronovskaja(cfg),
        cmd_derivative(cfg, order=1),
        cmd_derivative(cfg, order=2),
        cmd_bernstein(cfg),
        cmd_negative_control(cfg),
    ]
    structured_logger.info(
        "verify-all finished with {failed} failing suite(s) of {total}",
        failed=sum(not report.passed for report in reports),
        total=len(reports),
    )
    return reports
