from common.function_model.documents import MonomialDocument
from common.function_model.presets.base import fitted_scale
from common.function_model.taylor import TaylorFunction


class MonomialPreset:
    """e_p(z) = z^p."""

    name = "monomial"
    certified = True

    @classmethod
    def build(cls, document: MonomialDocument) -> TaylorFunction:
        coeffs = [0j] * document.degree + [1 + 0j]
        return TaylorFunction(
            coeffs=coeffs,
            M=fitted_scale(coeffs, document.A),
            A=document.A,
            R=document.radius(),
            label=f"e_{document.degree}",
        )
