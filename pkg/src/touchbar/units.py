"""Unit-tagged quantity parsing.

Values arrive from config files as strings such as ``"12 in"`` or
``"16.18 kN/m"``.  Conversion factors are held as decimals so that exact
definitions (1 in = 0.0254 m) survive the round trip to float.
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation

from .errors import ConfigError

STANDARD_GRAVITY = 9.80665  # m/s^2

_UNITS: dict[str, dict[str, Decimal]] = {
    "length": {
        "m": Decimal(1),
        "cm": Decimal("0.01"),
        "mm": Decimal("0.001"),
        "um": Decimal("1e-6"),
        "in": Decimal("0.0254"),
        "ft": Decimal("0.3048"),
    },
    "pressure": {
        "Pa": Decimal(1),
        "kPa": Decimal("1e3"),
        "MPa": Decimal("1e6"),
        "GPa": Decimal("1e9"),
    },
    "density": {
        "kg/m^3": Decimal(1),
        "kg/m3": Decimal(1),
        "g/cm^3": Decimal(1000),
        "g/cm3": Decimal(1000),
    },
    "stiffness": {
        "N/m": Decimal(1),
        "kN/m": Decimal(1000),
        "N/mm": Decimal(1000),
    },
    "mass": {
        "kg": Decimal(1),
        "g": Decimal("0.001"),
    },
    "damping": {
        "N*s/m": Decimal(1),
        "N.s/m": Decimal(1),
        "Ns/m": Decimal(1),
        "kg/s": Decimal(1),
    },
    "force": {
        "N": Decimal(1),
        "kN": Decimal(1000),
    },
    "frequency": {
        "Hz": Decimal(1),
        "kHz": Decimal(1000),
    },
    "time": {
        "s": Decimal(1),
        "ms": Decimal("0.001"),
        "us": Decimal("1e-6"),
    },
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S+)\s*$")


def known_units(kind: str) -> list[str]:
    return sorted(_UNITS[kind])


def parse_quantity(value, kind: str) -> float:
    """Convert ``"<number> <unit>"`` to a float in SI units.

    Bare numbers are rejected: every dimensional config value must carry
    its unit suffix.
    """
    if kind not in _UNITS:
        raise ConfigError(f"unknown quantity kind {kind!r}")
    if not isinstance(value, str):
        raise ConfigError(
            f"{kind} value {value!r} needs an explicit unit, one of {known_units(kind)}"
        )
    match = _QUANTITY.match(value)
    if match is None:
        raise ConfigError(f"cannot parse {kind} quantity {value!r}")
    number, unit = match.groups()
    table = _UNITS[kind]
    if unit not in table:
        raise ConfigError(f"unit {unit!r} is not a {kind} unit; use one of {known_units(kind)}")
    try:
        return float(Decimal(number) * table[unit])
    except InvalidOperation as exc:  # pragma: no cover - regex guards this
        raise ConfigError(f"cannot parse {kind} quantity {value!r}") from exc


def format_quantity(value: float, unit: str, kind: str) -> str:
    """Express an SI float in ``unit`` using the shortest round-trip repr."""
    factor = _UNITS[kind][unit]
    converted = Decimal(repr(float(value))) / factor
    return f"{float(converted)!r} {unit}"
