"""CSV tables for sweeps, summaries and depth profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..carrier_physics import CarrierProfile

SWEEP_HEADER = "power_mW,freq_GHz,il_dB,rl_dB,R_ohm,C_fF"
PROFILE_HEADER = "z_um,n_per_cm3,sigma_S_per_m"


@dataclass(frozen=True)
class SweepRow:
    power: float  # W
    frequency: float  # Hz
    il_db: float
    rl_db: float
    resistance: float  # ohm
    capacitance: float | None  # F


def _fixed(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def write_sweep_csv(rows: Iterable[SweepRow]) -> str:
    """Sweep table sorted power-major, frequency-minor."""
    rows = sorted(rows, key=lambda r: (r.power, r.frequency))
    if not rows:
        raise ValueError("sweep table needs at least one row")
    out = [SWEEP_HEADER]
    for r in rows:
        c_ff = 0.0 if r.capacitance is None else r.capacitance * 1e15
        out.append(
            ",".join(
                _fixed(v)
                for v in (r.power * 1e3, r.frequency / 1e9, r.il_db, r.rl_db, r.resistance, c_ff)
            )
        )
    return "\n".join(out) + "\n"


def write_profile_csv(profile: CarrierProfile, sigma: np.ndarray) -> str:
    out = [PROFILE_HEADER]
    for z, n, s in zip(profile.depths, profile.densities, sigma):
        out.append(f"{z * 1e6:.6f},{n * 1e-6:.9e},{s:.9e}")
    return "\n".join(out) + "\n"


def write_summary_csv(header: list[str], rows: list[list[float]]) -> str:
    out = [",".join(header)]
    out.extend(",".join(_fixed(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"
