"""Equivalent-circuit extraction from S-parameter data, and optical calibration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .carrier_physics import LaserExcitation, SiliconMaterial
from .device_model import (
    DEFAULT_PROFILE_POINTS,
    ChipletGeometry,
    EquivalentCircuit,
    Provenance,
    dark_sheet_conductance,
    gap_resistance,
    photo_sheet_conductance,
    switch_element,
)
from .errors import InsufficientData, NonPassiveData, OutOfRange
from .rf_network import MicrostripLine, TwoPortNetwork, abcd_line
from .simplex import nelder_mead

R_BOUNDS = (1e-3, 1e9)  # ohm
C_BOUNDS = (1e-18, 1e-9)  # F
MAX_ITERATIONS = 5000


@dataclass
class FitResult:
    circuit: EquivalentCircuit
    residual_rms: float
    iterations: int
    converged: bool
    objective_history: list[float] = field(default_factory=list)
    note: str = ""


class _Embedding:
    """Vectorised S-parameters of ``line -> series Z -> line`` on a fixed grid."""

    def __init__(self, data: TwoPortNetwork, lines: Sequence[MicrostripLine]):
        self.f = data.frequencies
        self.z0 = data.reference_impedance
        if len(lines) > 2:
            raise ValueError("expected at most two feed lines")
        if len(lines) == 1:
            lines = (lines[0], lines[0])
        self.left = self._line_stack(lines[0]) if lines else None
        self.right = self._line_stack(lines[1]) if lines else None

    def _line_stack(self, line: MicrostripLine) -> np.ndarray:
        out = np.empty((self.f.size, 2, 2), dtype=complex)
        for i, fi in enumerate(self.f):
            out[i] = abcd_line(line, fi).as_array()
        return out

    def s11_s21(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z0 = self.z0
        if self.left is None:
            den = 2.0 * z0 + z
            return z / den, 2.0 * z0 / den
        m = np.zeros((self.f.size, 2, 2), dtype=complex)
        m[:, 0, 0] = 1.0
        m[:, 1, 1] = 1.0
        m[:, 0, 1] = z
        m = self.left @ m @ self.right
        a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
        den = a + b / z0 + c * z0 + d
        return (a + b / z0 - c * z0 - d) / den, 2.0 / den


def _rpc_impedance(f: np.ndarray, r: float, c: float) -> np.ndarray:
    return r / (1.0 + 2j * np.pi * f * r * c)


def _series_r_from_s21(mag_s21, z0: float):
    return 2.0 * z0 * (1.0 / mag_s21 - 1.0)


def _initial_guess(data: TwoPortNetwork) -> tuple[float, float]:
    z0 = data.reference_impedance
    mags = np.abs(data.s21)
    r0 = float(_series_r_from_s21(mags[0], z0))
    # pure reactance X at the top of the band: |2 Z0 + jX| = 2 Z0 / |s21|
    x2 = (2.0 * z0 / mags[-1]) ** 2 - 4.0 * z0**2
    c0 = 1.0 / (2.0 * math.pi * data.frequencies[-1] * math.sqrt(x2)) if x2 > 0 else C_BOUNDS[1]
    r0 = min(max(r0, R_BOUNDS[0]), R_BOUNDS[1])
    c0 = min(max(c0, C_BOUNDS[0]), C_BOUNDS[1])
    return r0, c0


def _is_flat(values: np.ndarray) -> bool:
    finite = values[np.isfinite(values)]
    if finite.size < 2:
        return True
    return bool(np.all(np.abs(finite - finite[0]) <= 1e-12 * max(1.0, abs(finite[0]))))


def fit_off_model(
    data: TwoPortNetwork,
    *,
    magnitude_only: bool = False,
    lines: Sequence[MicrostripLine] = (),
    max_iterations: int = MAX_ITERATIONS,
) -> FitResult:
    """Fit a series R parallel C element to the measured S11 and S21.

    The objective is the summed squared error of S21 and S11 over the
    band, minimised over ``(log R, log C)``. With ``magnitude_only`` the
    magnitudes are compared instead of the complex values. Non-finite
    data entries (e.g. an unmeasured S11) are left out of the objective.
    ``lines`` are feed lines to embed the element in, for data taken at
    the connector planes.
    """
    if len(data) < 2:
        raise InsufficientData(f"OFF-state fit needs >= 2 frequency points, got {len(data)}")
    embed = _Embedding(data, lines)
    f = data.frequencies
    targets = [data.s21, data.s11]
    masks = [np.isfinite(t) for t in targets]
    if not masks[0].any():
        raise InsufficientData("no finite S21 samples")
    n_terms = sum(int(m.sum()) for m in masks)

    if _is_flat(data.s21) and _is_flat(data.s11):
        r = float(np.mean(_series_r_from_s21(np.abs(data.s21[masks[0]]), data.reference_impedance)))
        r = max(r, 0.0)
        circuit = EquivalentCircuit.r_par_c(r, C_BOUNDS[0], Provenance.FITTED)
        s11m, s21m = embed.s11_s21(_rpc_impedance(f, r, C_BOUNDS[0]))
        err = _objective_terms([s21m, s11m], targets, masks, magnitude_only)
        return FitResult(
            circuit,
            math.sqrt(err / n_terms),
            0,
            True,
            [err],
            "degenerate: response is flat in frequency, capacitance is unidentifiable "
            "and reported at its lower bound",
        )

    def objective(p):
        r, c = math.exp(p[0]), math.exp(p[1])
        s11m, s21m = embed.s11_s21(_rpc_impedance(f, r, c))
        return _objective_terms([s21m, s11m], targets, masks, magnitude_only)

    r0, c0 = _initial_guess(data)
    res = nelder_mead(
        objective,
        [math.log(r0), math.log(c0)],
        [0.5, 0.5],
        max_iterations=max_iterations,
    )
    r, c = math.exp(res.x[0]), math.exp(res.x[1])
    return FitResult(
        EquivalentCircuit.r_par_c(r, c, Provenance.FITTED),
        math.sqrt(res.fun / n_terms),
        res.iterations,
        res.converged,
        res.history,
        "" if res.converged else "iteration limit reached; best-so-far parameters returned",
    )


def _objective_terms(models, targets, masks, magnitude_only: bool) -> float:
    total = 0.0
    for model, target, mask in zip(models, targets, masks):
        if magnitude_only:
            diff = np.abs(model[mask]) - np.abs(target[mask])
        else:
            diff = model[mask] - target[mask]
        total += float(np.sum(np.abs(diff) ** 2))
    return total


def fit_on_resistance(data: TwoPortNetwork) -> FitResult:
    """Closed-form series resistance from |S21|, averaged across the band.

    The residual is the RMS magnitude error of S21 against the flat-R model.
    """
    if len(data) < 1:
        raise InsufficientData("ON-state fit needs at least one frequency point")
    mags = np.abs(data.s21)
    if np.any(mags > 1.0):
        worst = float(np.max(mags))
        raise NonPassiveData(f"|S21| = {worst:.9g} exceeds 1; data is not passive")
    z0 = data.reference_impedance
    r = float(np.mean(_series_r_from_s21(mags, z0)))
    r = max(r, 0.0)
    model = 2.0 * z0 / (2.0 * z0 + r)
    rms = float(np.sqrt(np.mean((model - mags) ** 2)))
    return FitResult(EquivalentCircuit.series_r(r, Provenance.FITTED), rms, 1, True, [rms**2])


def calibrate_coupling(
    measured_r: float,
    laser: LaserExcitation,
    mat: SiliconMaterial,
    chiplet: ChipletGeometry,
    *,
    n_points: int = DEFAULT_PROFILE_POINTS,
    rtol: float = 1e-9,
) -> float:
    """Coupling efficiency that makes the forward model reproduce ``measured_r``.

    Bisection in log-coupling on (0, 1]; the forward resistance falls
    monotonically as coupling rises.
    """
    if laser.power <= 0:
        raise OutOfRange("calibration needs a lit measurement (power > 0)")
    dark_r = gap_resistance(chiplet, dark_sheet_conductance(chiplet, mat))
    if not measured_r < dark_r:
        raise OutOfRange(
            f"measured resistance {measured_r:.6g} ohm is not below the dark value {dark_r:.6g} ohm",
            required=0.0,
        )

    def r_at(coupling):
        return switch_element(chiplet, laser.with_coupling(coupling), mat, n_points).resistance

    r_full = r_at(1.0)
    if measured_r < r_full:
        g_needed = chiplet.gap_length / (chiplet.width * (measured_r - 2 * chiplet.contact_resistance)) \
            if measured_r > 2 * chiplet.contact_resistance else math.inf
        g_photo = photo_sheet_conductance(chiplet, laser.with_coupling(1.0), mat, n_points)
        required = (g_needed - dark_sheet_conductance(chiplet, mat)) / g_photo
        raise OutOfRange(
            f"even full coupling gives {r_full:.6g} ohm > target {measured_r:.6g} ohm; "
            f"required coupling {required:.6g}",
            required=required,
        )
    if measured_r == r_full:
        return 1.0

    # walk down in octaves of log-coupling until the forward R overshoots
    hi, lo = 0.0, -1.0
    while r_at(math.exp(lo)) <= measured_r:
        hi = lo
        lo *= 2.0
        if lo < -700.0:
            raise OutOfRange("no coupling above 1e-304 reaches the measured resistance")
    while hi - lo > rtol:
        mid = 0.5 * (lo + hi)
        if r_at(math.exp(mid)) > measured_r:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def calibrated_chiplet(chiplet: ChipletGeometry, off: EquivalentCircuit) -> ChipletGeometry:
    """Pin the chiplet's dark resistance and pad capacitance to an OFF-state fit."""
    return replace(
        chiplet,
        dark_resistance_override=off.resistance,
        gap_capacitance_override=off.capacitance,
    )
