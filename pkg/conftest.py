import pytest

from common.function_model import TaylorFunction, load_function
from common.types import OperatorConfig


@pytest.fixture(scope="session")
def cosh_sqrt() -> TaylorFunction:
    """cosh(sqrt(0.2 z)) on the disk of radius 10."""
    return load_function({"preset": "cosh_sqrt", "A": 0.2})


@pytest.fixture(scope="session")
def monomial():
    def build(degree: int) -> TaylorFunction:
        return load_function({"preset": "monomial", "degree": degree})

    return build


@pytest.fixture(scope="session")
def sqrt_config():
    def build(n: int) -> OperatorConfig:
        return OperatorConfig(n=n, bn_rule="sqrt")

    return build
