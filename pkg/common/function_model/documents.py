"""Function-spec documents: either a named preset with its parameters or explicit coefficients."""

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

Coefficient = tuple[float, float]


def _as_pair(value) -> Coefficient:
    if isinstance(value, list | tuple):
        if len(value) != 2:  # noqa: PLR2004
            msg = f"a coefficient is [re, im], got {value!r}"
            raise ValueError(msg)
        return float(value[0]), float(value[1])
    return float(value), 0.0


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    A: float = Field(gt=0, lt=1, description="Certificate rate")
    R: float | None = Field(default=None, gt=1, description="Disk radius, 2/A when omitted")

    def radius(self) -> float:
        return self.R if self.R is not None else 2.0 / self.A


class MonomialDocument(_Document):
    preset: Literal["monomial"]
    degree: int = Field(ge=0, le=64)
    A: float = Field(default=0.4, gt=0, lt=1)


class PolynomialDocument(_Document):
    preset: Literal["polynomial"]
    coeffs: list[Coefficient] = Field(min_length=1, max_length=65)
    A: float = Field(default=0.4, gt=0, lt=1)

    @field_validator("coeffs", mode="before")
    @classmethod
    def coefficient_pairs(cls, value):
        return [_as_pair(c) for c in value] if isinstance(value, list) else value


class CoshSqrtDocument(_Document):
    """c_p = M A^p / (2p)!, i.e. M cosh(sqrt(A z))."""

    preset: Literal["cosh_sqrt"]
    A: float = Field(default=0.2, gt=0, lt=1)
    M: float = Field(default=1.0, gt=0)
    truncate: int | None = Field(default=None, ge=0, le=64, description="Last stored index")


class ExpUncertifiedDocument(_Document):
    """c_p = 1/p!. No (M, A) certifies it; loading needs an explicit override."""

    preset: Literal["exp_uncertified"]
    A: float = Field(default=0.9, gt=0, lt=1)
    M: float = Field(default=1.0, gt=0)
    truncate: int | None = Field(default=None, ge=0, le=64, description="Last stored index")


PresetDocument = Annotated[
    MonomialDocument | PolynomialDocument | CoshSqrtDocument | ExpUncertifiedDocument,
    Field(discriminator="preset"),
]


class CoeffsDocument(BaseModel):
    """Explicit coefficients with their certificate. Reals may be written as decimal strings."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    coeffs: list[Coefficient] = Field(max_length=65)
    M: float = Field(gt=0)
    A: float = Field(gt=0, lt=1)
    R: float = Field(gt=1)
    tail_bound: float = Field(default=0.0, ge=0)
    label: str = "coeffs"

    @field_validator("coeffs", mode="before")
    @classmethod
    def coefficient_pairs(cls, value):
        return [_as_pair(c) for c in value] if isinstance(value, list) else value
