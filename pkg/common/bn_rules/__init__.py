from common.exceptions import ConfigurationError

from .base import BnRule
from .growth import ConstantRule, LinearRule, LogRule, Pow23Rule, SqrtRule

bn_rules: dict[str, type[BnRule]] = {
    SqrtRule.name: SqrtRule,
    Pow23Rule.name: Pow23Rule,
    LogRule.name: LogRule,
    LinearRule.name: LinearRule,
}

DEFAULT_BN_RULE = SqrtRule.name


def get_bn_rule(name_or_value: str | float) -> BnRule:
    if isinstance(name_or_value, int | float):
        return _constant_rule(float(name_or_value))
    rule = bn_rules.get(name_or_value)
    if rule:
        return rule()
    try:
        value = float(name_or_value)
    except ValueError:
        available = ", ".join(bn_rules.keys())
        msg = f"Invalid b_n rule: {name_or_value}. Available: {available} or a positive number"
        raise ConfigurationError(msg) from None
    return _constant_rule(value)


def _constant_rule(value: float) -> BnRule:
    if not value > 0:
        msg = f"A constant b_n must be positive, got {value}"
        raise ConfigurationError(msg)
    return ConstantRule(value)


__all__ = ["DEFAULT_BN_RULE", "BnRule", "bn_rules", "get_bn_rule"]
