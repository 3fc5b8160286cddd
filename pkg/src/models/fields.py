"""Numeric coercion for values read from JSON config blocks."""
from typing import Any

from ..core.errors import InvalidParameter


def as_float(name: str, value: Any) -> float:
    """float(value), or InvalidParameter naming the field."""
    if isinstance(value, bool):
        raise InvalidParameter(f"{name} must be a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a number, got {value!r}") from None


def as_int(name: str, value: Any) -> int:
    """Integer value of an int or an integral float; anything else is InvalidParameter."""
    if isinstance(value, bool):
        raise InvalidParameter(f"{name} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    number = as_float(name, value)
    if not number.is_integer():
        raise InvalidParameter(f"{name} must be an integer, got {value!r}")
    return int(number)
