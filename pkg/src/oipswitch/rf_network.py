"""Two-port algebra, microstrip lines and the line-switch-line cascade."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import FREE_SPACE_IMPEDANCE, SPEED_OF_LIGHT, VACUUM_PERMEABILITY
from .device_model import EquivalentCircuit, impedance
from .errors import NoConvergence, SingularConversion

DEFAULT_REFERENCE_IMPEDANCE = 50.0


@dataclass(frozen=True)
class AbcdMatrix:
    a: complex
    b: complex  # ohm
    c: complex  # S
    d: complex

    @classmethod
    def identity(cls) -> "AbcdMatrix":
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)


def abcd_series(z: complex) -> AbcdMatrix:
    return AbcdMatrix(1.0 + 0j, complex(z), 0j, 1.0 + 0j)


def abcd_shunt(y: complex) -> AbcdMatrix:
    return AbcdMatrix(1.0 + 0j, 0j, complex(y), 1.0 + 0j)


def cascade(x: AbcdMatrix, y: AbcdMatrix) -> AbcdMatrix:
    return AbcdMatrix(
        x.a * y.a + x.b * y.c,
        x.a * y.b + x.b * y.d,
        x.c * y.a + x.d * y.c,
        x.c * y.b + x.d * y.d,
    )


def abcd_to_s(m: AbcdMatrix, z0: float) -> tuple[complex, complex, complex, complex]:
    """Return ``(s11, s12, s21, s22)`` referenced to the real impedance ``z0``."""
    if not z0 > 0:
        raise ValueError(f"reference impedance must be > 0, got {z0}")
    den = m.a + m.b / z0 + m.c * z0 + m.d
    if abs(den) < 1e-30:
        raise SingularConversion("ABCD to S denominator vanishes")
    s11 = (m.a + m.b / z0 - m.c * z0 - m.d) / den
    s12 = 2.0 * (m.a * m.d - m.b * m.c) / den
    s21 = 2.0 / den
    s22 = (-m.a + m.b / z0 - m.c * z0 + m.d) / den
    return s11, s12, s21, s22


def s_to_abcd(s11: complex, s12: complex, s21: complex, s22: complex, z0: float) -> AbcdMatrix:
    if abs(s21) < 1e-30:
        raise SingularConversion("S to ABCD needs a non-zero s21")
    two_s21 = 2.0 * s21
    return AbcdMatrix(
        ((1 + s11) * (1 - s22) + s12 * s21) / two_s21,
        z0 * ((1 + s11) * (1 + s22) - s12 * s21) / two_s21,
        ((1 - s11) * (1 - s22) - s12 * s21) / (z0 * two_s21),
        ((1 - s11) * (1 + s22) + s12 * s21) / two_s21,
    )


@dataclass(frozen=True)
class TwoPortNetwork:
    """Frequency-sampled S-matrix. Frequencies in Hz, all arrays the same length."""

    frequencies: np.ndarray
    s11: np.ndarray
    s21: np.ndarray
    s12: np.ndarray
    s22: np.ndarray
    reference_impedance: float = DEFAULT_REFERENCE_IMPEDANCE

    def __post_init__(self):
        f = np.array(self.frequencies, dtype=float, ndmin=1)
        if f.ndim != 1 or f.size == 0:
            raise ValueError("frequencies must be a non-empty 1-D array")
        if np.any(f <= 0):
            raise ValueError("frequencies must be > 0")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must increase strictly")
        if not self.reference_impedance > 0:
            raise ValueError("reference impedance must be > 0")
        f.flags.writeable = False
        object.__setattr__(self, "frequencies", f)
        for name in ("s11", "s21", "s12", "s22"):
            s = np.array(getattr(self, name), dtype=complex, ndmin=1)
            if s.shape != f.shape:
                raise ValueError(f"{name} has shape {s.shape}, expected {f.shape}")
            s.flags.writeable = False
            object.__setattr__(self, name, s)

    def __len__(self) -> int:
        return self.frequencies.size

    @property
    def insertion_loss_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return -20.0 * np.log10(np.abs(self.s21))

    @property
    def return_loss_db(self) -> np.ndarray:
        """Infinite for a perfect match."""
        with np.errstate(divide="ignore"):
            return -20.0 * np.log10(np.abs(self.s11))

    def abcd(self, index: int) -> AbcdMatrix:
        return s_to_abcd(
            self.s11[index], self.s12[index], self.s21[index], self.s22[index],
            self.reference_impedance,
        )

    def is_passive(self, tol: float = 1e-6) -> bool:
        return all(np.all(np.abs(s) <= 1.0 + tol) for s in (self.s11, self.s21, self.s12, self.s22))


def network_from_abcd(frequencies, matrices: Sequence[AbcdMatrix], z0: float) -> TwoPortNetwork:
    s = np.array([abcd_to_s(m, z0) for m in matrices], dtype=complex).reshape(-1, 4)
    return TwoPortNetwork(frequencies, s[:, 0], s[:, 2], s[:, 1], s[:, 3], z0)


# -- microstrip ---------------------------------------------------------------


@dataclass(frozen=True)
class MicrostripLine:
    substrate_epsilon: float = 3.45
    substrate_height: float = 0.762e-3  # m
    trace_width: float = 1.74e-3  # m
    copper_thickness: float = 17.5e-6  # m
    physical_length: float = 15e-3  # m
    loss_tangent: float = 0.002
    conductor_conductivity: float = 5.8e7  # S/m
    lossy: bool = False

    def __post_init__(self):
        for name in ("substrate_height", "trace_width"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("copper_thickness", "physical_length", "loss_tangent"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.conductor_conductivity > 0:
            raise ValueError("conductor_conductivity must be > 0")
        if not self.substrate_epsilon >= 1:
            raise ValueError("substrate_epsilon must be >= 1")


def _hj_z01(u: float) -> float:
    """Air-filled microstrip impedance for normalised width ``u``."""
    fu = 6.0 + (2.0 * math.pi - 6.0) * math.exp(-((30.666 / u) ** 0.7528))
    return FREE_SPACE_IMPEDANCE / (2.0 * math.pi) * math.log(fu / u + math.sqrt(1.0 + (2.0 / u) ** 2))


def _hj_eps_eff(u: float, er: float) -> float:
    a = (
        1.0
        + math.log((u**4 + (u / 52.0) ** 2) / (u**4 + 0.432)) / 49.0
        + math.log(1.0 + (u / 18.1) ** 3) / 18.7
    )
    b = 0.564 * ((er - 0.9) / (er + 3.0)) ** 0.053
    return (er + 1.0) / 2.0 + (er - 1.0) / 2.0 * (1.0 + 10.0 / u) ** (-a * b)


def _hammerstad_jensen(er: float, h: float, w: float, t: float) -> tuple[float, float]:
    u = w / h
    if t > 0:
        tn = t / h
        du1 = tn / math.pi * math.log(1.0 + 4.0 * math.e / (tn / math.tanh(math.sqrt(6.517 * u)) ** 2))
        dur = 0.5 * (1.0 + 1.0 / math.cosh(math.sqrt(er - 1.0))) * du1
        u1, ur = u + du1, u + dur
    else:
        u1 = ur = u
    eps_r_width = _hj_eps_eff(ur, er)
    z0 = _hj_z01(ur) / math.sqrt(eps_r_width)
    eps_eff = eps_r_width * (_hj_z01(u1) / _hj_z01(ur)) ** 2
    return z0, eps_eff


def microstrip_analyze(line: MicrostripLine) -> tuple[float, float]:
    """Quasi-static ``(Z0, eps_eff)`` from the Hammerstad-Jensen closed forms."""
    return _hammerstad_jensen(
        line.substrate_epsilon, line.substrate_height, line.trace_width, line.copper_thickness
    )


def microstrip_synthesize(
    epsilon: float,
    height: float,
    target_z0: float,
    copper_thickness: float = 0.0,
    rtol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Trace width (m) giving ``target_z0`` by bisection on ``log(w/h)``."""
    if not 10.0 <= target_z0 <= 200.0:
        raise ValueError(f"target impedance {target_z0} ohm outside [10, 200] ohm")
    if not epsilon >= 1 or not height > 0:
        raise ValueError("need epsilon >= 1 and height > 0")

    def z_of(log_u):
        return _hammerstad_jensen(epsilon, height, height * math.exp(log_u), copper_thickness)[0]

    lo, hi = math.log(1e-4), math.log(1e3)
    if not z_of(hi) <= target_z0 <= z_of(lo):
        raise NoConvergence(f"target {target_z0} ohm not bracketed by the width search range")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        z = z_of(mid)
        if abs(z - target_z0) <= rtol * target_z0:
            return height * math.exp(mid)
        # Z0 falls as the trace widens
        if z > target_z0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            return height * math.exp(0.5 * (lo + hi))
    raise NoConvergence(f"width synthesis did not converge in {max_iter} iterations")


def line_attenuation(line: MicrostripLine, f: float) -> float:
    """Dielectric plus conductor attenuation in Np/m; zero for lossless lines."""
    if not line.lossy:
        return 0.0
    z0, eps_eff = microstrip_analyze(line)
    er = line.substrate_epsilon
    k0 = 2.0 * math.pi * f / SPEED_OF_LIGHT
    alpha_d = 0.0
    if er > 1.0:
        alpha_d = k0 * er * (eps_eff - 1.0) * line.loss_tangent / (2.0 * math.sqrt(eps_eff) * (er - 1.0))
    rs = math.sqrt(math.pi * f * VACUUM_PERMEABILITY / line.conductor_conductivity)
    alpha_c = rs / (z0 * line.trace_width)
    return alpha_d + alpha_c


def abcd_line(line: MicrostripLine, f: float) -> AbcdMatrix:
    if not f > 0:
        raise ValueError("frequency must be > 0")
    z0, eps_eff = microstrip_analyze(line)
    beta = 2.0 * math.pi * f * math.sqrt(eps_eff) / SPEED_OF_LIGHT
    gl = complex(line_attenuation(line, f), beta) * line.physical_length
    ch, sh = np.cosh(gl), np.sinh(gl)
    return AbcdMatrix(complex(ch), complex(z0 * sh), complex(sh / z0), complex(ch))


def switch_response(
    lines: Sequence[MicrostripLine],
    element: EquivalentCircuit,
    frequencies,
    z0: float = DEFAULT_REFERENCE_IMPEDANCE,
) -> TwoPortNetwork:
    """S-parameters of ``input line -> series element -> output line``.

    ``lines`` holds zero, one (used on both sides) or two feed lines.
    """
    f = np.asarray(frequencies, dtype=float)
    if f.ndim != 1 or f.size == 0:
        raise ValueError("frequency grid must be a non-empty 1-D array")
    if len(lines) == 0:
        left = right = None
    elif len(lines) == 1:
        left = right = lines[0]
    elif len(lines) == 2:
        left, right = lines
    else:
        raise ValueError("expected at most two feed lines")
    z = impedance(element, f)
    matrices = []
    for fi, zi in zip(f, z):
        m = abcd_series(zi)
        if left is not None:
            m = cascade(abcd_line(left, fi), m)
        if right is not None:
            m = cascade(m, abcd_line(right, fi))
        matrices.append(m)
    return network_from_abcd(f, matrices, z0)
