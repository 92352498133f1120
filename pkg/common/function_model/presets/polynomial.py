from common.function_model.documents import PolynomialDocument
from common.function_model.presets.base import fitted_scale
from common.function_model.taylor import TaylorFunction


class PolynomialPreset:
    """A finite Taylor series, certified by fitting M to its support."""

    name = "polynomial"
    certified = True

    @classmethod
    def build(cls, document: PolynomialDocument) -> TaylorFunction:
        coeffs = [complex(re, im) for re, im in document.coeffs]
        return TaylorFunction(
            coeffs=coeffs,
            M=fitted_scale(coeffs, document.A),
            A=document.A,
            R=document.radius(),
            label="polynomial",
        )
