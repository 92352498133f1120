from common.function_model.documents import CoeffsDocument, PresetDocument
from common.function_model.loader import load_function, parse_function_document, serialize_function
from common.function_model.polynomial import ComplexPolynomial
from common.function_model.taylor import (
    DecayCheck,
    TaylorFunction,
    derivative_coeffs,
    eval_taylor,
    eval_taylor_derivative,
    validate_decay,
)

__all__ = [
    "CoeffsDocument",
    "ComplexPolynomial",
    "DecayCheck",
    "PresetDocument",
    "TaylorFunction",
    "derivative_coeffs",
    "eval_taylor",
    "eval_taylor_derivative",
    "load_function",
    "parse_function_document",
    "serialize_function",
    "validate_decay",
]
