import math

from src.shared.config import SIGNIFICANT_DIGITS


def format_number(value, digits=SIGNIFICANT_DIGITS):
    """
    Formats a number with a fixed count of significant digits.

    Returns:
        str: Decimal representation, identical for identical inputs.
    """
    if value is None:
        return ""
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        return "0"
    return f"{value:.{digits}g}"


def matches_level(value, levels, tolerance):
    """Return True if value equals one of levels within tolerance."""
    return any(abs(value - level) <= tolerance for level in levels)


def strictly_increasing(values):
    return all(b > a for a, b in zip(values, values[1:]))


class _InfiniteMass:
    """Marker for an infinite mass: its inverse is exactly zero."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE_MASS"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_InfiniteMass, ())


INFINITE_MASS = _InfiniteMass()


def is_infinite_mass(mass):
    return mass is INFINITE_MASS


def inverse_mass(mass):
    return 0.0 if mass is INFINITE_MASS else 1.0 / mass


def mass_as_float(mass):
    return math.inf if mass is INFINITE_MASS else float(mass)


def parse_mass(text):
    """'inf' (any case) -> INFINITE_MASS, otherwise a float."""
    return INFINITE_MASS if str(text).strip().lower() in ("inf", "infinite", "infinity") else float(text)
