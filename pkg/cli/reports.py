"""CSV and JSON reports. Numbers carry 17 significant digits and nothing time-dependent is written."""

import csv
import json
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from common.types import ConvergenceRecord

SWEEP_COLUMNS = ["n", "b_n", "error", "bound", "ratio", "slope_running"]
MOMENT_COLUMNS = [
    "p",
    "degree",
    "leading_coefficient",
    "max_oracle_delta",
    "sup_deviation",
    "moment_bound",
    "margin",
]
SUMMARY_FILE = "summary.json"


def format_number(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.17g}"


class Assertion(BaseModel):
    passed: bool
    detail: str = ""


class SuiteReport(BaseModel):
    """Outcome of one suite: its CSV file, named assertions and scalar metrics."""

    name: str
    csv_file: str
    assertions: dict[str, Assertion] = Field(default_factory=dict)
    metrics: dict[str, float | int | str | bool | None] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(assertion.passed for assertion in self.assertions.values())

    def summary(self) -> dict[str, Any]:
        return {
            "assertions": {name: assertion.model_dump() for name, assertion in self.assertions.items()},
            "csv": self.csv_file,
            "metrics": {name: _json_number(value) for name, value in self.metrics.items()},
            "passed": self.passed,
        }


def _json_number(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_rows(path: Path, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else format_number(cell) for cell in row])


def write_sweep_csv(path: Path, records: Sequence[ConvergenceRecord], slopes: Sequence[float | None]) -> None:
    rows = [
        [record.n, record.b_n, record.error, record.bound, record.ratio, slope]
        for record, slope in zip(records, slopes, strict=True)
    ]
    write_rows(path, SWEEP_COLUMNS, rows)


def write_summary(path: Path, reports: Sequence[SuiteReport]) -> None:
    document = {
        "passed": all(report.passed for report in reports),
        "suites": {report.name: report.summary() for report in reports},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
