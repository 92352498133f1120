class NonFiniteValueError(Exception):
    """Raised when a result overflows the double range or a NaN/Inf would escape."""


class LengthMismatchError(Exception):
    """Raised when contour samples do not match the contour's node count."""


class DomainError(Exception):
    """Raised when a point lies outside the disk D_R or has Re(z) > b_n."""


class TruncationError(Exception):
    """Raised when a Poisson series would need more than K_MAX terms."""


class QuadratureNotConvergedError(Exception):
    """Raised when two Gauss-Legendre node counts disagree beyond tolerance."""


class ConditioningError(Exception):
    """Raised when a Poisson series cancels so far that double precision cannot deliver the requested accuracy."""


class ContourNotConvergedError(Exception):
    """Raised when node doubling on a circle reaches the cap without agreement."""


class PointOnContourError(Exception):
    """Raised when a Cauchy-integral point is on or outside the contour."""


class DivergenceError(Exception):
    """Raised when a geometric constant is requested with A*r >= 1."""


class GeometryError(Exception):
    """Raised when the radii of a derivative estimate are not ordered 1 <= r < r1."""


class CertificateViolationError(Exception):
    """Raised when Taylor coefficients break |c_p| <= M A^p / (2p)!."""

    def __init__(self, msg: str, index: int):
        super().__init__(msg)
        self.index = index


class FunctionSpecParseError(Exception):
    """Raised when a function-spec document cannot be parsed."""


class DegenerateDataError(Exception):
    """Raised when an order fit gets too few points or non-positive errors."""


class AdmissibilityError(Exception):
    """Raised when a b_n rule gives b_n <= 0 or b_n / n >= 1 on a sweep."""


class MomentTableSizeError(Exception):
    """Raised when a moment table larger than P_MAX is requested."""


class ConfigurationError(Exception):
    """Raised for invalid experiment configuration."""
