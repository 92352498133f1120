import json
import logging
from pathlib import Path

from pydantic import TypeAdapter, ValidationError

from common.exceptions import CertificateViolationError, FunctionSpecParseError
from common.function_model.documents import CoeffsDocument, PresetDocument
from common.function_model.presets import get_preset
from common.function_model.taylor import TaylorFunction, validate_decay

logger = logging.getLogger(__name__)

preset_document_adapter = TypeAdapter(PresetDocument)


def parse_function_document(spec: dict | str | Path) -> PresetDocument | CoeffsDocument:
    """Parse a function-spec document given as a mapping, JSON text, or a path to a JSON file."""
    try:
        if isinstance(spec, Path) or (isinstance(spec, str) and not spec.lstrip().startswith("{")):
            spec = Path(spec).read_text(encoding="utf-8")
        document = json.loads(spec) if isinstance(spec, str) else spec
        if not isinstance(document, dict):
            msg = f"a function spec is a mapping, got {type(document).__name__}"
            raise FunctionSpecParseError(msg)
        if "preset" in document:
            return preset_document_adapter.validate_python(document)
        return CoeffsDocument.model_validate(document)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        msg = f"could not parse function spec: {e}"
        raise FunctionSpecParseError(msg) from e


def load_function(spec: dict | str | Path, allow_uncertified: bool = False) -> TaylorFunction:
    """Build a TaylorFunction from a function-spec document and validate its decay certificate.

    Uncertified functions (the exp_uncertified preset, or coefficients breaking their own certificate)
    raise CertificateViolationError unless ``allow_uncertified`` is set, in which case they load flagged.
    """
    document = parse_function_document(spec)
    if isinstance(document, CoeffsDocument):
        return _load_coeffs(document, allow_uncertified)

    preset = get_preset(document.preset)
    function = preset.build(document)
    if not function.certified and not allow_uncertified:
        check_index = _first_violation(function)
        msg = (
            f"preset {preset.name} is not certified by M={function.M}, A={function.A} "
            f"(first violation at c_{check_index}); pass --allow-uncertified to load it"
        )
        raise CertificateViolationError(msg, check_index)
    if not function.certified:
        logger.warning("Loaded uncertified function %s; bound checks on it are negative controls", function.label)
    return function


def _first_violation(function: TaylorFunction) -> int:
    check = validate_decay(function.coeffs, function.M, function.A)
    return check.first_violation if check.first_violation is not None else -1


def _load_coeffs(document: CoeffsDocument, allow_uncertified: bool) -> TaylorFunction:
    fields = {
        "coeffs": [complex(re, im) for re, im in document.coeffs],
        "M": document.M,
        "A": document.A,
        "R": document.R,
        "tail_bound": document.tail_bound,
        "label": document.label,
    }
    try:
        return TaylorFunction(**fields)
    except CertificateViolationError:
        if not allow_uncertified:
            raise
        logger.warning("Coefficients of %s break their certificate; loading them uncertified", document.label)
        return TaylorFunction(**fields, certified=False)


def serialize_function(f: TaylorFunction) -> dict:
    """Coefficient-form document for f. Reals are written with 17 significant digits, so loading is bit-exact."""
    return {
        "coeffs": [[f"{c.real:.17g}", f"{c.imag:.17g}"] for c in f.coeffs],
        "M": f"{f.M:.17g}",
        "A": f"{f.A:.17g}",
        "R": f"{f.R:.17g}",
        "tail_bound": f"{f.tail_bound:.17g}",
        "label": f.label,
    }
