"""Unit-suffixed quantities such as ``"915 nm"`` or ``"3000 ohm·cm"``.

Every suffix maps to an exact SI scale factor within one dimension.
"""

from __future__ import annotations

import math
import re

from ..errors import ConfigError

_UNITS = {
    "length": {
        "m": 1.0,
        "cm": 1e-2,
        "mm": 1e-3,
        "um": 1e-6,
        "µm": 1e-6,
        "μm": 1e-6,
        "nm": 1e-9,
        "mil": 25.4e-6,
        "in": 25.4e-3,
    },
    "area": {"m2": 1.0, "m^2": 1.0, "mm2": 1e-6, "mm^2": 1e-6, "um2": 1e-12, "um^2": 1e-12},
    "power": {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "kW": 1e3},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "μs": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "resistivity": {"ohm·m": 1.0, "ohm·cm": 1e-2, "Ω·m": 1.0, "Ω·cm": 1e-2},
    "resistance": {"ohm": 1.0, "Ω": 1.0, "kohm": 1e3, "kΩ": 1e3, "mohm": 1e-3},
    "capacitance": {"F": 1.0, "pF": 1e-12, "fF": 1e-15, "aF": 1e-18, "nF": 1e-9},
    "inverse_length": {"1/m": 1.0, "1/cm": 1e2, "m^-1": 1.0, "cm^-1": 1e2},
    "velocity": {"m/s": 1.0, "cm/s": 1e-2},
    "mobility": {"m2/Vs": 1.0, "m^2/(V·s)": 1.0, "cm2/Vs": 1e-4, "cm^2/(V·s)": 1e-4},
    "conductivity": {"S/m": 1.0},
    "dimensionless": {"": 1.0},
}

# spellings folded onto the canonical "·" product sign
_PRODUCT_SPELLINGS = ("*", "×", "-", ".", "x", " ")

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def _normalize_suffix(suffix: str) -> str:
    s = suffix.strip()
    for name in ("ohm", "Ω"):
        for sep in _PRODUCT_SPELLINGS:
            s = s.replace(f"{name}{sep}cm", f"{name}·cm").replace(f"{name}{sep}m", f"{name}·m")
    return s


def unit_scale(unit: str, dimension: str) -> float:
    table = _UNITS[dimension]
    key = _normalize_suffix(unit)
    if key not in table:
        raise KeyError(unit)
    return table[key]


def _divisor(scale: float) -> float | None:
    # 1e-3 is inexact in binary; dividing by the exact integer 1000 rounds correctly
    if scale >= 1:
        return None
    inv = round(1.0 / scale)
    return float(inv) if abs(inv * scale - 1.0) < 1e-12 else None


def to_si(value: float, unit: str, dimension: str) -> float:
    scale = unit_scale(unit, dimension)
    div = _divisor(scale)
    return value / div if div else value * scale


def from_si(value: float, unit: str, dimension: str) -> float:
    scale = unit_scale(unit, dimension)
    div = _divisor(scale)
    return value * div if div else value / scale


def parse_quantity(raw, dimension: str, key_path: str = "") -> float:
    """Convert a number or a ``"<number> <unit>"`` string to SI.

    Bare numbers are taken to be in SI already.
    """
    if isinstance(raw, bool):
        raise ConfigError(f"expected a {dimension} quantity, got a boolean", key_path)
    if isinstance(raw, (int, float)):
        value = float(raw)
    elif isinstance(raw, str):
        m = _NUMBER.match(raw)
        if not m:
            raise ConfigError(f"cannot parse quantity {raw!r}", key_path)
        number, unit = m.groups()
        try:
            value = to_si(float(number), unit, dimension)
        except KeyError:
            allowed = ", ".join(sorted(k for k in _UNITS[dimension] if k))
            raise ConfigError(
                f"unit {unit!r} is not a {dimension} unit (allowed: {allowed})", key_path
            ) from None
    else:
        raise ConfigError(f"expected a {dimension} quantity, got {type(raw).__name__}", key_path)
    if not math.isfinite(value):
        raise ConfigError("quantity must be finite", key_path)
    return value
