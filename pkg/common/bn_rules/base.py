from typing import Protocol


class BnRule(Protocol):
    """Protocol for a scale sequence b_n.

    An admissible rule has b_n -> infinity and b_n / n -> 0. Admissibility is only checked on the
    finite grid a sweep actually visits: b_n > 0 and b_n / n < 1 for every n in it.

    Attributes:
        name: The name the rule is registered and selected under.
    """

    name: str

    def __call__(self, n: int) -> float: ...

    def check_admissible(self, ns: list[int]) -> None: ...
