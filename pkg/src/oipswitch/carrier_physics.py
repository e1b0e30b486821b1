"""Photo-generated excess carriers in an illuminated silicon die.

The steady-state excess density at depth ``z`` below the illuminated face is

    n(z) = eta*alpha*tau * (P*lambda/(A*h*c)) * (1-R)/(1-alpha^2 L^2)
           * [exp(-alpha z) - (alpha L^2 + s tau)/(L + s tau) * exp(-z/L)]

with ``s`` the surface recombination velocity. The expression is linear in
the optical power and has a removable singularity at ``alpha*L == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import ELEMENTARY_CHARGE, PLANCK, SPEED_OF_LIGHT
from .errors import NonPhysicalProfile

SINGULAR_THRESHOLD = 1e-9
SINGULAR_STEP = 1e-6
NEGATIVE_TOLERANCE = 1.0  # m^-3


@dataclass(frozen=True)
class LaserExcitation:
    power: float  # W
    wavelength: float  # m
    spot_area: float  # m^2
    coupling_efficiency: float = 1.0

    def __post_init__(self):
        if not self.power >= 0:
            raise ValueError(f"laser power must be >= 0, got {self.power}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if not self.spot_area > 0:
            raise ValueError(f"spot area must be > 0, got {self.spot_area}")
        if not 0 < self.coupling_efficiency <= 1:
            raise ValueError(
                f"coupling efficiency must lie in (0, 1], got {self.coupling_efficiency}"
            )

    @classmethod
    def from_spot_diameter(
        cls, power: float, wavelength: float, diameter: float, coupling_efficiency: float = 1.0
    ) -> "LaserExcitation":
        return cls(power, wavelength, math.pi * (diameter / 2) ** 2, coupling_efficiency)

    def with_power(self, power: float) -> "LaserExcitation":
        return replace(self, power=power)

    def with_coupling(self, coupling_efficiency: float) -> "LaserExcitation":
        return replace(self, coupling_efficiency=coupling_efficiency)


@dataclass(frozen=True)
class SiliconMaterial:
    """Optical and transport constants of the die.

    Defaults describe lightly doped n-type float-zone silicon under 915 nm
    illumination; only the reflectance and the dark resistivity are
    measured properties of the actual wafer.
    """

    quantum_efficiency: float = 0.9
    absorption_coefficient: float = 3.3e4  # 1/m
    carrier_lifetime: float = 25e-6  # s
    diffusion_length: float = 212e-6  # m
    surface_velocity: float = 1.0  # m/s
    surface_reflectance: float = 0.3
    electron_mobility: float = 0.135  # m^2/(V s)
    hole_mobility: float = 0.048  # m^2/(V s)
    dark_resistivity: float = 30.0  # ohm m

    def __post_init__(self):
        positive = (
            "quantum_efficiency",
            "absorption_coefficient",
            "carrier_lifetime",
            "diffusion_length",
            "surface_velocity",
            "electron_mobility",
            "hole_mobility",
            "dark_resistivity",
        )
        for name in positive:
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if not 0 <= self.surface_reflectance < 1:
            raise ValueError(
                f"surface_reflectance must lie in [0, 1), got {self.surface_reflectance}"
            )

    @property
    def dark_conductivity(self) -> float:
        return 1.0 / self.dark_resistivity

    @property
    def mobility_sum(self) -> float:
        return self.electron_mobility + self.hole_mobility


@dataclass(frozen=True)
class CarrierProfile:
    depths: np.ndarray  # m
    densities: np.ndarray  # 1/m^3

    def __post_init__(self):
        z = np.asarray(self.depths, dtype=float)
        n = np.asarray(self.densities, dtype=float)
        if z.ndim != 1 or z.shape != n.shape or z.size < 2:
            raise ValueError("depths and densities must be 1-D arrays of equal length >= 2")
        if z[0] != 0.0 or np.any(np.diff(z) <= 0):
            raise ValueError("depth grid must start at 0 and increase strictly")
        if np.any(n < 0):
            raise ValueError("densities must be non-negative")
        z.flags.writeable = False
        n.flags.writeable = False
        object.__setattr__(self, "depths", z)
        object.__setattr__(self, "densities", n)

    @property
    def thickness(self) -> float:
        return float(self.depths[-1])


def photon_flux(laser: LaserExcitation) -> float:
    """Photons per second delivered into the die."""
    return laser.coupling_efficiency * laser.power * laser.wavelength / (PLANCK * SPEED_OF_LIGHT)


def _eq_density(z, flux_density, mat: SiliconMaterial, diffusion_length: float):
    alpha = mat.absorption_coefficient
    tau = mat.carrier_lifetime
    L = diffusion_length
    s_tau = mat.surface_velocity * tau
    prefactor = (
        mat.quantum_efficiency
        * alpha
        * tau
        * flux_density
        * (1.0 - mat.surface_reflectance)
        / (1.0 - (alpha * L) ** 2)
    )
    surface_term = (alpha * L * L + s_tau) / (L + s_tau)
    return prefactor * (np.exp(-alpha * z) - surface_term * np.exp(-z / L))


def _density(z, laser: LaserExcitation, mat: SiliconMaterial):
    flux_density = photon_flux(laser) / laser.spot_area
    aL2 = (mat.absorption_coefficient * mat.diffusion_length) ** 2
    if abs(1.0 - aL2) < SINGULAR_THRESHOLD * aL2:
        # removable 0/0: average the two sides of the singular point
        L = mat.diffusion_length
        lo = _eq_density(z, flux_density, mat, L * (1.0 - SINGULAR_STEP))
        hi = _eq_density(z, flux_density, mat, L * (1.0 + SINGULAR_STEP))
        n = 0.5 * (lo + hi)
    else:
        n = _eq_density(z, flux_density, mat, mat.diffusion_length)
    n = np.asarray(n, dtype=float)
    if np.any(n < -NEGATIVE_TOLERANCE):
        worst = float(np.min(n))
        raise NonPhysicalProfile(
            f"excess carrier density {worst:.6g} m^-3 is negative; check material parameters"
        )
    return n


def excess_density(laser: LaserExcitation, mat: SiliconMaterial, z: float) -> float:
    """Excess carrier density (m^-3) at depth ``z`` metres below the lit face."""
    if not z >= 0:
        raise ValueError(f"depth must be >= 0, got {z}")
    return float(_density(float(z), laser, mat))


def carrier_profile(
    laser: LaserExcitation, mat: SiliconMaterial, thickness: float, n_points: int
) -> CarrierProfile:
    if not thickness > 0:
        raise ValueError(f"thickness must be > 0, got {thickness}")
    if n_points < 2:
        raise ValueError(f"need at least 2 grid points, got {n_points}")
    z = np.linspace(0.0, thickness, int(n_points))
    n = _density(z, laser, mat)
    # rounding residue around zero is tolerated above; store it as zero
    return CarrierProfile(z, np.maximum(n, 0.0))


def conductivity_profile(profile: CarrierProfile, mat: SiliconMaterial) -> np.ndarray:
    """Conductivity in S/m at each grid depth: photo term plus dark background."""
    return ELEMENTARY_CHARGE * mat.mobility_sum * profile.densities + mat.dark_conductivity
