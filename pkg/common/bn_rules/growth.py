import math

from common.exceptions import AdmissibilityError


class _GrowthRule:
    name: str

    def __call__(self, n: int) -> float:
        raise NotImplementedError

    def check_admissible(self, ns: list[int]) -> None:
        for n in ns:
            b_n = self(n)
            if not b_n > 0 or not b_n / n < 1:
                msg = f"b_n rule {self.name} is not admissible at n={n}: b_n={b_n!r}, b_n/n={b_n / n!r}"
                raise AdmissibilityError(msg)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class SqrtRule(_GrowthRule):
    name = "sqrt"

    def __call__(self, n: int) -> float:
        return math.sqrt(n)


class Pow23Rule(_GrowthRule):
    name = "pow23"

    def __call__(self, n: int) -> float:
        return n ** (2.0 / 3.0)


class LogRule(_GrowthRule):
    name = "log"

    def __call__(self, n: int) -> float:
        return math.log(n + 2)


class LinearRule(_GrowthRule):
    """b_n = n, which breaks b_n / n -> 0. Kept so the admissibility check has something to reject."""

    name = "const-violating"

    def __call__(self, n: int) -> float:
        return float(n)


class ConstantRule(_GrowthRule):
    def __init__(self, value: float):
        self.value = float(value)
        self.name = repr(self.value)

    def __call__(self, n: int) -> float:  # noqa: ARG002
        return self.value
