"""Lumped series element presented by the illuminated chiplet.

The chiplet bridges the microstrip gap through a short strip of silicon
between two gold pads. Lateral conduction across that strip is modelled
with the depth-integrated conductivity, and the pads themselves form a
coplanar-strip capacitor in parallel with it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .carrier_physics import (
    LaserExcitation,
    SiliconMaterial,
    carrier_profile,
    conductivity_profile,
)
from .constants import SILICON_PERMITTIVITY, VACUUM_PERMITTIVITY
from .errors import GridMismatch

DEFAULT_PROFILE_POINTS = 2001


class Topology(str, enum.Enum):
    SERIES_R = "SeriesR"
    SERIES_R_PAR_C = "SeriesRparC"


class Provenance(str, enum.Enum):
    FORWARD_MODELED = "ForwardModeled"
    FITTED = "Fitted"


@dataclass(frozen=True)
class ChipletGeometry:
    gap_length: float = 75e-6  # m, exposed silicon between the pads
    width: float = 500e-6  # m
    thickness: float = 200e-6  # m
    length: float = 3.075e-3  # m, overall die length
    contact_resistance: float = 0.0  # ohm per contact
    gap_capacitance_override: float | None = None  # F
    dark_resistance_override: float | None = None  # ohm, e.g. from an OFF-state fit

    def __post_init__(self):
        for name in ("gap_length", "width", "thickness", "length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.contact_resistance >= 0:
            raise ValueError("contact_resistance must be >= 0")
        if self.gap_length >= self.length:
            raise ValueError("gap_length must be shorter than the die length")
        if self.gap_capacitance_override is not None and not self.gap_capacitance_override > 0:
            raise ValueError("gap_capacitance_override must be > 0")
        if self.dark_resistance_override is not None and not (
            self.dark_resistance_override > 2 * self.contact_resistance
        ):
            raise ValueError("dark_resistance_override must exceed the contact resistance")


@dataclass(frozen=True)
class EquivalentCircuit:
    topology: Topology
    resistance: float
    capacitance: float | None = None
    provenance: Provenance = Provenance.FORWARD_MODELED

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if not self.resistance >= 0:
            raise ValueError(f"resistance must be >= 0, got {self.resistance}")
        if self.topology is Topology.SERIES_R_PAR_C:
            if self.capacitance is None or not self.capacitance > 0:
                raise ValueError("SeriesRparC requires a positive capacitance")
        elif self.capacitance is not None:
            raise ValueError("SeriesR carries no capacitance")

    @classmethod
    def series_r(cls, resistance: float, provenance=Provenance.FORWARD_MODELED):
        return cls(Topology.SERIES_R, resistance, None, provenance)

    @classmethod
    def r_par_c(cls, resistance: float, capacitance: float, provenance=Provenance.FORWARD_MODELED):
        return cls(Topology.SERIES_R_PAR_C, resistance, capacitance, provenance)


def sheet_conductance(sigma: np.ndarray, depths: np.ndarray, thickness: float) -> float:
    """Integrate conductivity over depth with the trapezoidal rule; returns siemens."""
    sigma = np.asarray(sigma, dtype=float)
    depths = np.asarray(depths, dtype=float)
    if sigma.shape != depths.shape or depths.size < 2:
        raise GridMismatch("conductivity and depth arrays differ in shape")
    if depths[0] != 0.0 or not math.isclose(depths[-1], thickness, rel_tol=1e-12):
        raise GridMismatch(
            f"profile spans [{depths[0]:.6g}, {depths[-1]:.6g}] m, expected [0, {thickness:.6g}] m"
        )
    return float(np.trapezoid(sigma, depths))


def gap_resistance(chiplet: ChipletGeometry, sheet: float) -> float:
    if not sheet > 0:
        raise ValueError(f"sheet conductance must be > 0, got {sheet}")
    return chiplet.gap_length / (chiplet.width * sheet) + 2.0 * chiplet.contact_resistance


def elliptic_k(k: float, tol: float = 1e-15) -> float:
    """Complete elliptic integral of the first kind, modulus ``k``, via the AGM."""
    if not 0 <= k < 1:
        raise ValueError(f"modulus must lie in [0, 1), got {k}")
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(64):
        if abs(a - b) <= tol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def off_capacitance(chiplet: ChipletGeometry) -> float:
    """Pad-to-pad capacitance across the gold gap (farads).

    Coplanar strips of length ``s`` (half the die minus half the gap) on
    either side of the gap, half-space silicon below and air above.
    """
    if chiplet.gap_capacitance_override is not None:
        return chiplet.gap_capacitance_override
    g = chiplet.gap_length
    s = chiplet.length / 2 - g / 2
    k = g / (g + 2 * s)
    k_prime = math.sqrt((1.0 - k) * (1.0 + k))
    eps_eff = (SILICON_PERMITTIVITY + 1.0) / 2.0
    return VACUUM_PERMITTIVITY * eps_eff * chiplet.width * elliptic_k(k_prime) / elliptic_k(k)


def dark_sheet_conductance(chiplet: ChipletGeometry, mat: SiliconMaterial) -> float:
    """Sheet conductance of the unlit die, honouring a fitted dark resistance."""
    if chiplet.dark_resistance_override is not None:
        r_bulk = chiplet.dark_resistance_override - 2.0 * chiplet.contact_resistance
        return chiplet.gap_length / (chiplet.width * r_bulk)
    return mat.dark_conductivity * chiplet.thickness


def photo_sheet_conductance(
    chiplet: ChipletGeometry,
    laser: LaserExcitation,
    mat: SiliconMaterial,
    n_points: int = DEFAULT_PROFILE_POINTS,
) -> float:
    """Depth-integrated conductivity contributed by excess carriers alone."""
    if laser.power == 0:
        return 0.0
    profile = carrier_profile(laser, mat, chiplet.thickness, n_points)
    sigma = conductivity_profile(profile, mat) - mat.dark_conductivity
    return sheet_conductance(sigma, profile.depths, chiplet.thickness)


def switch_element(
    chiplet: ChipletGeometry,
    laser: LaserExcitation,
    mat: SiliconMaterial,
    n_points: int = DEFAULT_PROFILE_POINTS,
) -> EquivalentCircuit:
    """Forward-model the R parallel C element for the given illumination.

    Illumination is taken as uniform across the full width of the gap.
    """
    sheet = dark_sheet_conductance(chiplet, mat) + photo_sheet_conductance(
        chiplet, laser, mat, n_points
    )
    return EquivalentCircuit.r_par_c(gap_resistance(chiplet, sheet), off_capacitance(chiplet))


def impedance(ec: EquivalentCircuit, f):
    """Complex impedance of the element at frequency ``f`` (scalar or array, Hz)."""
    f_arr = np.asarray(f, dtype=float)
    if np.any(f_arr <= 0):
        raise ValueError("frequency must be > 0")
    if ec.topology is Topology.SERIES_R:
        z = np.full(f_arr.shape, complex(ec.resistance))
    else:
        z = ec.resistance / (1.0 + 2j * math.pi * f_arr * ec.resistance * ec.capacitance)
    return complex(z) if np.ndim(f) == 0 else z
