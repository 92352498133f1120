from enum import StrEnum, auto

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

from common.bn_rules import DEFAULT_BN_RULE, get_bn_rule
from common.settings import get_settings

settings = get_settings()

# complex numbers stand in for the (re, im) pair everywhere
ComplexValue = complex


class ContourSpec(BaseModel):
    """A circle sampled at node_count equispaced points center + radius * exp(2 pi i j / node_count)."""

    model_config = ConfigDict(frozen=True)

    radius: float = Field(gt=0)
    center: complex = 0j
    node_count: int = Field(default=settings.CONTOUR_NODES, ge=8)

    @field_validator("node_count")
    @classmethod
    def node_count_is_even(cls, value: int) -> int:
        if value % 2:
            msg = f"node_count must be even, got {value}"
            raise ValueError(msg)
        return value

    def nodes(self) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(self.node_count) / self.node_count
        return self.center + self.radius * np.exp(1j * theta)

    def with_node_count(self, node_count: int) -> "ContourSpec":
        return self.model_copy(update={"node_count": node_count})


class OperatorConfig(BaseModel):
    """Index n, the scale rule giving b_n, and the truncation policy of the direct series."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    bn_rule: str | float = DEFAULT_BN_RULE
    series_tol: float = Field(default=settings.SERIES_TOL, gt=0)
    quadrature_nodes: int = Field(default=settings.QUADRATURE_NODES, ge=8)

    @field_validator("bn_rule")
    @classmethod
    def bn_rule_resolves(cls, value: str | float) -> str | float:
        get_bn_rule(value)
        return value

    @computed_field
    @property
    def b_n(self) -> float:
        return get_bn_rule(self.bn_rule)(self.n)

    @property
    def alpha(self) -> float:
        """(n + 2) / b_n, the split index of the Voronovskaja estimate (diagnostic only)."""
        return (self.n + 2) / self.b_n

    @property
    def rate(self) -> float:
        return (self.b_n + 1) / (self.n + 2)


class SweepKind(StrEnum):
    CONVERGE = auto()
    VORONOVSKAJA = auto()
    DERIVATIVE = auto()


class ConvergenceRecord(BaseModel):
    """One row of an n-sweep."""

    model_config = ConfigDict(frozen=True)

    n: int
    b_n: float
    error: float = Field(ge=0)
    bound: float = Field(ge=0)
    ratio: float
    tail: float = Field(default=0.0, ge=0, description="Bound on the error the stored Taylor coefficients cannot see")
    derivative_order: int = Field(default=0, ge=0)
    exact: bool = Field(default=False, description="The error vanished up to rounding")
    checked: bool = Field(default=True, description="n >= n0, so the bound is asserted on this row")

    @property
    def passed(self) -> bool:
        return not self.checked or self.error + self.tail <= self.bound


class OrderFit(BaseModel):
    """Least-squares fit of log(error) against log(n), with the ratio window of the sweep."""

    slope: float
    intercept: float
    ratio_min: float
    ratio_max: float

    @property
    def ratio_window(self) -> float:
        return self.ratio_max / self.ratio_min
