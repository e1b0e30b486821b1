"""Touchstone v1 two-port (``.s2p``) reader and writer."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NonMonotoneFrequency, ParseError
from ..rf_network import TwoPortNetwork

FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")
# |s| = 0 has no dB value; write it at this floor (1e-20 linear)
DB_FLOOR = -400.0


def _num(x: float) -> str:
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".12g")


def _pair(s: complex, fmt: str) -> tuple[str, str]:
    if fmt == "RI":
        return _num(s.real), _num(s.imag)
    mag = abs(s)
    ang = math.degrees(math.atan2(s.imag, s.real)) if mag > 0 else 0.0
    if fmt == "MA":
        return _num(mag), _num(ang)
    db = 20.0 * math.log10(mag) if mag > 0 else DB_FLOOR
    return _num(max(db, DB_FLOOR)), _num(ang)


def write_touchstone(net: TwoPortNetwork, fmt: str = "RI", comments: list[str] | None = None) -> str:
    fmt = fmt.upper()
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    lines = [f"! {c}" for c in (comments or [])]
    lines.append(f"# GHz S {fmt} R {_num(net.reference_impedance)}")
    for i, f in enumerate(net.frequencies):
        cols = [repr(float(f) / 1e9)]
        for s in (net.s11[i], net.s21[i], net.s12[i], net.s22[i]):
            cols.extend(_pair(complex(s), fmt))
        lines.append(" ".join(cols))
    return "\n".join(lines) + "\n"


def _to_complex(a: float, b: float, fmt: str) -> complex:
    if fmt == "RI":
        return complex(a, b)
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    if fmt == "DB" and a <= DB_FLOOR:
        mag = 0.0
    rad = math.radians(b)
    return complex(mag * math.cos(rad), mag * math.sin(rad))


def _parse_option_line(body: str, lineno: int) -> tuple[float, str, float]:
    tokens = body.split()
    scale, fmt, z0 = FREQ_UNITS["GHZ"], "MA", 50.0
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in FREQ_UNITS:
            scale = FREQ_UNITS[tok]
        elif tok in FORMATS:
            fmt = tok
        elif tok == "S":
            pass
        elif tok in ("Y", "Z", "H", "G"):
            raise ParseError(f"only S-parameter files are supported, got {tokens[i]!r}", lineno)
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise ParseError("option 'R' needs a reference impedance", lineno)
            try:
                z0 = float(tokens[i + 1])
            except ValueError:
                raise ParseError(f"bad reference impedance {tokens[i + 1]!r}", lineno) from None
            if not z0 > 0:
                raise ParseError("reference impedance must be > 0", lineno)
            i += 1
        else:
            raise ParseError(f"unknown option {tokens[i]!r}", lineno)
        i += 1
    return scale, fmt, z0


def read_touchstone(text: str) -> TwoPortNetwork:
    """Parse a v1 two-port file. Missing option line means ``# GHz S MA R 50``."""
    scale, fmt, z0 = FREQ_UNITS["GHZ"], "MA", 50.0
    seen_option = False
    freqs: list[float] = []
    rows: list[list[complex]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("!", 1)[0].strip()
        if not body:
            continue
        if body.startswith("#"):
            if seen_option:
                raise ParseError("more than one option line", lineno)
            if freqs:
                raise ParseError("option line must precede the data", lineno)
            scale, fmt, z0 = _parse_option_line(body[1:], lineno)
            seen_option = True
            continue
        parts = body.split()
        if len(parts) != 9:
            raise ParseError(f"expected 9 columns for a two-port row, found {len(parts)}", lineno)
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"non-numeric value ({exc})", lineno) from None
        f = values[0] * scale
        if not f > 0:
            raise ParseError("frequency must be > 0", lineno)
        if freqs and f <= freqs[-1]:
            raise NonMonotoneFrequency(
                f"frequency {values[0]!r} does not increase on the previous row", lineno
            )
        freqs.append(f)
        rows.append([_to_complex(values[k], values[k + 1], fmt) for k in (1, 3, 5, 7)])
    if not freqs:
        raise ParseError("file contains no data rows")
    s = np.array(rows, dtype=complex)
    # column order is S11 S21 S12 S22
    return TwoPortNetwork(np.array(freqs), s[:, 0], s[:, 1], s[:, 2], s[:, 3], z0)
