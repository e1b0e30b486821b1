"""Config-driven composition: calibration, forward model and sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit_fit import (
    FitResult,
    calibrate_coupling,
    calibrated_chiplet,
    fit_off_model,
    fit_on_resistance,
)
from .device_model import (
    ChipletGeometry,
    EquivalentCircuit,
    dark_sheet_conductance,
    gap_resistance,
    off_capacitance,
    switch_element,
)
from .formats.config import RunConfig
from .formats.tables import SweepRow
from .rf_network import TwoPortNetwork, switch_response


@dataclass(frozen=True)
class CalibratedModel:
    config: RunConfig
    chiplet: ChipletGeometry
    coupling_efficiency: float
    off_fit: FitResult | None = None
    on_fit: FitResult | None = None

    @property
    def dark_resistance(self) -> float:
        return gap_resistance(self.chiplet, dark_sheet_conductance(self.chiplet, self.config.material))

    def element(self, power: float) -> EquivalentCircuit:
        cfg = self.config
        if cfg.resistance_override is not None:
            return EquivalentCircuit.r_par_c(cfg.resistance_override, off_capacitance(self.chiplet))
        laser = cfg.laser(power, self.coupling_efficiency)
        return switch_element(self.chiplet, laser, cfg.material, cfg.integration_points)

    def response(self, power: float) -> TwoPortNetwork:
        cfg = self.config
        return switch_response(
            (cfg.board_line,), self.element(power), cfg.frequencies, cfg.reference_impedance
        )


def magnitude_network(frequencies, loss_db, z0: float) -> TwoPortNetwork:
    """Network known only through |S21| (in dB of loss); S11 is left unknown (NaN)."""
    f = np.asarray(frequencies, dtype=float)
    s21 = 10.0 ** (-np.broadcast_to(np.asarray(loss_db, dtype=float), f.shape) / 20.0)
    unknown = np.full(f.shape, complex(math.nan, math.nan))
    return TwoPortNetwork(f, unknown, s21.astype(complex), s21.astype(complex), unknown, z0)


def calibrate(cfg: RunConfig) -> CalibratedModel:
    chiplet = cfg.chiplet
    off_fit = on_fit = None
    if cfg.off_reference:
        refs = sorted(cfg.off_reference, key=lambda r: r.frequency)
        data = magnitude_network(
            [r.frequency for r in refs], [r.isolation_db for r in refs], cfg.reference_impedance
        )
        off_fit = fit_off_model(data, magnitude_only=True, lines=(cfg.board_line,))
        chiplet = calibrated_chiplet(chiplet, off_fit.circuit)
    coupling = cfg.coupling_efficiency
    if cfg.on_reference is not None:
        ref = cfg.on_reference
        data = magnitude_network(cfg.frequencies, ref.insertion_loss_db, cfg.reference_impedance)
        on_fit = fit_on_resistance(data)
        coupling = calibrate_coupling(
            on_fit.circuit.resistance,
            cfg.laser(ref.power, 1.0),
            cfg.material,
            chiplet,
            n_points=cfg.integration_points,
        )
    return CalibratedModel(cfg, chiplet, coupling, off_fit, on_fit)


def sweep_rows(model: CalibratedModel) -> list[SweepRow]:
    rows = []
    for power in model.config.powers:
        element = model.element(power)
        net = model.response(power)
        for f, il, rl in zip(net.frequencies, net.insertion_loss_db, net.return_loss_db):
            rows.append(SweepRow(power, float(f), float(il), float(rl), element.resistance, element.capacitance))
    return rows
