from common.function_model.presets.base import FunctionPreset
from common.function_model.presets.cosh_sqrt import CoshSqrtPreset
from common.function_model.presets.exp_uncertified import ExpUncertifiedPreset
from common.function_model.presets.monomial import MonomialPreset
from common.function_model.presets.polynomial import PolynomialPreset

presets: dict[str, type[FunctionPreset]] = {
    MonomialPreset.name: MonomialPreset,
    PolynomialPreset.name: PolynomialPreset,
    CoshSqrtPreset.name: CoshSqrtPreset,
    ExpUncertifiedPreset.name: ExpUncertifiedPreset,
}


def get_preset(name: str) -> type[FunctionPreset]:
    preset = presets.get(name)
    if preset:
        return preset
    available = ", ".join(presets.keys())
    msg = f"Invalid function preset: {name}. Available: {available}"
    raise ValueError(msg)


__all__ = ["FunctionPreset", "get_preset", "presets"]
