import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from cli.commands import (
    cmd_converge,
    cmd_derivative,
    cmd_moments,
    cmd_verify_all,
    cmd_voronovskaja,
)
from cli.config import ExperimentConfig, load_experiment_config
from cli.reports import SUMMARY_FILE, SuiteReport, write_summary
from common.exceptions import (
    AdmissibilityError,
    CertificateViolationError,
    ConditioningError,
    ConfigurationError,
    ContourNotConvergedError,
    DegenerateDataError,
    DivergenceError,
    DomainError,
    FunctionSpecParseError,
    GeometryError,
    MomentTableSizeError,
    NonFiniteValueError,
    PointOnContourError,
    QuadratureNotConvergedError,
    TruncationError,
)
from common.settings import get_structured_logger

logger = logging.getLogger(__name__)
structured_logger = get_structured_logger()

EXIT_PASSED = 0
EXIT_ASSERTION_FAILED = 1
EXIT_CONFIGURATION_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

CONFIGURATION_ERRORS = (
    AdmissibilityError,
    CertificateViolationError,
    ConfigurationError,
    DegenerateDataError,
    DivergenceError,
    DomainError,
    FunctionSpecParseError,
    GeometryError,
    MomentTableSizeError,
    ValidationError,
)
NUMERICAL_ERRORS = (
    ConditioningError,
    ContourNotConvergedError,
    NonFiniteValueError,
    PointOnContourError,
    QuadratureNotConvergedError,
    TruncationError,
)

COMMANDS = {
    "moments": lambda cfg: [cmd_moments(cfg)],
    "converge": lambda cfg: [cmd_converge(cfg)],
    "voronovskaja": lambda cfg: [cmd_voronovskaja(cfg)],
    "derivative": lambda cfg: [cmd_derivative(cfg)],
    "verify-all": cmd_verify_all,
}

# flag destination -> ExperimentConfig field
FIELD_FLAGS = {
    "function": "function",
    "A": "A",
    "M": "M",
    "bn": "bn_rule",
    "n": "n",
    "pmax": "p_max",
    "r": "r",
    "r1": "r1",
    "p": "derivative_order",
    "tol": "tol",
    "n0": "n0",
    "out": "out",
    "seed": "seed",
    "workers": "workers",
}
N_RANGE_FLAGS = {"n_start": "start", "n_stop": "stop", "growth": "growth"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdc-lab",
        description="Verify approximation estimates of the complex Szasz-Durrmeyer-Chlodowsky operator",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", type=Path, help="JSON config file; flags override its values")
        sub.add_argument("--function", help="Preset name, inline JSON, or path to a function spec")
        sub.add_argument("--A", type=float, dest="A", help="Certificate rate override")
        sub.add_argument("--M", type=float, dest="M", help="Certificate scale override")
        sub.add_argument("--bn", help="b_n rule: sqrt, pow23, log, const-violating or a positive value")
        sub.add_argument("--n", type=int, help="Index of the moments table")
        sub.add_argument("--pmax", type=int, help="Last moment index of the moments table")
        sub.add_argument("--n-start", type=int, dest="n_start")
        sub.add_argument("--n-stop", type=int, dest="n_stop")
        sub.add_argument("--growth", choices=["geometric", "linear"])
        sub.add_argument("--r", type=float, help="Radius of the disk the error is measured on")
        sub.add_argument("--r1", type=float, help="Radius of the contour for derivatives")
        sub.add_argument("--p", type=int, help="Derivative order")
        sub.add_argument("--tol", type=float, help="Series truncation tolerance")
        sub.add_argument("--n0", type=int, help="First n at which bounds are asserted")
        sub.add_argument("--out", type=Path, help="Output directory for CSV and JSON reports")
        sub.add_argument("--seed", type=int)
        sub.add_argument("--workers", type=int, help="Ray workers for sweeps; 1 runs in-process")
        sub.add_argument("--allow-uncertified", action="store_true", default=None, dest="allow_uncertified")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides: dict[str, Any] = {
        field: getattr(args, flag) for flag, field in FIELD_FLAGS.items() if getattr(args, flag) is not None
    }
    if args.allow_uncertified:
        overrides["allow_uncertified"] = True
    n_range = {field: getattr(args, flag) for flag, field in N_RANGE_FLAGS.items() if getattr(args, flag) is not None}
    if n_range:
        overrides["n_range"] = n_range
    return load_experiment_config(args.config, overrides)


def run(command: str, cfg: ExperimentConfig) -> int:
    structured_logger.info("Running {command} into {out}", command=command, out=str(cfg.out))
    reports: list[SuiteReport] = COMMANDS[command](cfg)
    write_summary(cfg.out / SUMMARY_FILE, reports)
    failed = [report.name for report in reports if not report.passed]
    if failed:
        structured_logger.warning("Assertions failed in {suites}", suites=", ".join(failed))
        return EXIT_ASSERTION_FAILED
    structured_logger.info("All assertions passed for {command}", command=command)
    return EXIT_PASSED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return run(args.command, cfg)
    except CONFIGURATION_ERRORS as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_CONFIGURATION_ERROR
    except NUMERICAL_ERRORS:
        logger.exception("Numerical failure while running %s", args.command)
        return EXIT_NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
