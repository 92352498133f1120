import json
import logging
from enum import StrEnum, auto
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.bn_rules import DEFAULT_BN_RULE, get_bn_rule
from common.exceptions import ConfigurationError, FunctionSpecParseError
from common.function_model.presets import presets
from common.settings import get_settings

logger = logging.getLogger(__name__)
settings = get_settings()

# presets that take an explicit M; polynomial families fit theirs
PRESETS_WITH_SCALE = {"cosh_sqrt", "exp_uncertified"}


class Growth(StrEnum):
    GEOMETRIC = auto()
    LINEAR = auto()


class NRange(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: int = Field(default=8, ge=1)
    stop: int = Field(default=512, ge=1)
    growth: Growth = Growth.GEOMETRIC
    step: int = Field(default=8, ge=1, description="Increment of a linear grid")

    @model_validator(mode="after")
    def start_not_after_stop(self) -> "NRange":
        if self.start > self.stop:
            msg = f"n_range start {self.start} is after stop {self.stop}"
            raise ValueError(msg)
        return self

    def grid(self) -> list[int]:
        if self.growth == Growth.LINEAR:
            return list(range(self.start, self.stop + 1, self.step))
        ns = [self.start]
        while ns[-1] * 2 <= self.stop:
            ns.append(ns[-1] * 2)
        return ns


class ExperimentConfig(BaseModel):
    """One experiment: the function, the b_n rule, the n-grid, radii and tolerances.

    A JSON config file mirrors these fields; command-line flags override it.
    """

    model_config = ConfigDict(extra="forbid")

    function: str | dict[str, Any] = Field(
        default="cosh_sqrt", description="Preset name, JSON document, or path to a JSON function spec"
    )
    A: float | None = Field(default=None, gt=0, lt=1, description="Overrides the certificate rate")
    M: float | None = Field(default=None, gt=0, description="Overrides the certificate scale where the preset has one")
    bn_rule: str | float = DEFAULT_BN_RULE
    n_range: NRange = Field(default_factory=NRange)
    n: int = Field(default=10, ge=1, description="Index of the moments table")
    p_max: int = Field(default=6, ge=0, description="Last moment index of the moments table")
    r: float = Field(default=1.0, ge=1)
    r1: float = Field(default=2.0, gt=1)
    derivative_order: int = Field(default=1, ge=1, le=4)
    tol: float = Field(default=settings.SERIES_TOL, gt=0)
    n0: int = Field(default=settings.N0, ge=1)
    out: Path = Path("reports")
    seed: int = 7
    allow_uncertified: bool = False
    workers: int = Field(default=settings.SWEEP_WORKERS, ge=1)

    @model_validator(mode="after")
    def bn_rule_resolves(self) -> "ExperimentConfig":
        get_bn_rule(self.bn_rule)
        return self

    def function_document(self) -> dict[str, Any]:
        """The function spec as a mapping, with the A and M overrides applied."""
        document = dict(resolve_function_spec(self.function))
        if self.A is not None:
            document["A"] = self.A
        if self.M is not None:
            if "preset" not in document or document["preset"] in PRESETS_WITH_SCALE:
                document["M"] = self.M
            else:
                logger.warning("M is fitted by the %s preset; ignoring M=%s", document.get("preset"), self.M)
        return document


def resolve_function_spec(spec: str | dict[str, Any]) -> dict[str, Any]:
    if isinstance(spec, dict):
        return spec
    if spec in presets:
        return {"preset": spec}
    try:
        text = spec if spec.lstrip().startswith("{") else Path(spec).read_text(encoding="utf-8")
        document = json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        msg = f"function {spec!r} is neither a preset, a JSON document nor a readable spec file: {e}"
        raise FunctionSpecParseError(msg) from e
    if not isinstance(document, dict):
        msg = f"a function spec is a mapping, got {type(document).__name__}"
        raise FunctionSpecParseError(msg)
    return document


def load_experiment_config(config_path: Path | None, overrides: dict[str, Any]) -> ExperimentConfig:
    """Merge a JSON config file with explicit overrides; overrides win, nested n_range keys merge."""
    values: dict[str, Any] = {}
    if config_path is not None:
        try:
            values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            msg = f"could not read config file {config_path}: {e}"
            raise ConfigurationError(msg) from e
    n_range = {**values.get("n_range", {}), **overrides.pop("n_range", {})}
    values.update(overrides)
    if n_range:
        values["n_range"] = n_range
    return ExperimentConfig.model_validate(values)
