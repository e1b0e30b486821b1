import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oipswitch.carrier_physics import LaserExcitation, SiliconMaterial
from oipswitch.circuit_fit import (
    C_BOUNDS,
    calibrate_coupling,
    fit_off_model,
    fit_on_resistance,
)
from oipswitch.device_model import (
    ChipletGeometry,
    EquivalentCircuit,
    Provenance,
    Topology,
    photo_sheet_conductance,
    switch_element,
)
from oipswitch.errors import InsufficientData, NonPassiveData, OutOfRange
from oipswitch.pipeline import magnitude_network
from oipswitch.rf_network import MicrostripLine, TwoPortNetwork, microstrip_synthesize, switch_response

FREQS = np.linspace(1e9, 4e9, 31)
SPOT = math.pi * (50e-6) ** 2


def rc_network(r, c, f=FREQS, z0=50.0):
    return switch_response((), EquivalentCircuit.r_par_c(r, c), f, z0)


def board_line():
    h = 30 * 25.4e-6
    return MicrostripLine(3.45, h, microstrip_synthesize(3.45, h, 50.0, 17.5e-6), 17.5e-6, 15e-3)


def series_r_from_loss(il_db, z0=50.0):
    """R = 2 Z0 (10^(IL/20) - 1), written out independently of the fitter."""
    return 2 * z0 * (10 ** (il_db / 20) - 1)


class TestOffFit:
    def test_recovers_dark_circuit(self):
        res = fit_off_model(rc_network(22500.0, 65e-15))
        assert res.converged
        assert res.circuit.provenance is Provenance.FITTED
        assert res.circuit.resistance == pytest.approx(22500.0, rel=1e-3)
        assert res.circuit.capacitance == pytest.approx(65e-15, rel=1e-3)

    def test_abstract_isolation_points(self):
        data = magnitude_network([1e9, 4e9], [27.0, 17.0], 50.0)
        res = fit_off_model(data, magnitude_only=True)
        c = res.circuit
        z1 = c.resistance / (1 + 2j * math.pi * 1e9 * c.resistance * c.capacitance)
        # |2 Z0 + Z| = 100 * 10^(27/20)
        assert abs(100 + z1) == pytest.approx(100 * 10 ** (27 / 20), rel=1e-6)
        # unique (R, C) solution found with scipy least_squares from several starts
        assert c.resistance == pytest.approx(3492.8514, rel=1e-5)
        assert c.capacitance == pytest.approx(57.252807e-15, rel=1e-5)
        assert abs(z1) == pytest.approx(2175.081, rel=1e-5)

    def test_flat_data_is_degenerate(self):
        data = switch_response((), EquivalentCircuit.series_r(12.0), FREQS)
        res = fit_off_model(data)
        assert res.converged
        assert res.circuit.capacitance < 1e-15
        assert res.circuit.capacitance == C_BOUNDS[0]
        assert res.circuit.resistance == pytest.approx(12.0, rel=1e-12)
        assert "degenerate" in res.note

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            fit_off_model(rc_network(1e3, 1e-13, f=[1e9]))

    def test_objective_history_non_increasing(self):
        res = fit_off_model(rc_network(1e4, 2e-13))
        h = np.array(res.objective_history)
        assert h.size > 10
        assert np.all(np.diff(h) <= 0)

    def test_iteration_limit_reports_unconverged(self):
        res = fit_off_model(rc_network(1e4, 2e-13), max_iterations=5)
        assert not res.converged
        assert res.iterations == 5
        assert res.residual_rms >= 0

    def test_through_feed_lines(self):
        line = board_line()
        chip = ChipletGeometry()
        element = switch_element(chip, LaserExcitation(0.05, 915e-9, SPOT, 1e-3), SiliconMaterial())
        data = switch_response((line,), element, FREQS)
        res = fit_off_model(data, lines=(line,))
        assert res.circuit.resistance == pytest.approx(element.resistance, rel=1e-3)
        assert res.circuit.capacitance == pytest.approx(element.capacitance, rel=1e-2)

    @pytest.mark.parametrize("r", [1.0, 10.0, 100.0, 1e3, 1e4, 1e5])
    @pytest.mark.parametrize("c", [1e-15, 1e-14, 1e-13, 1e-12])
    def test_five_decade_grid(self, r, c):
        res = fit_off_model(rc_network(r, c))
        assert res.circuit.resistance == pytest.approx(r, rel=5e-3)
        assert res.circuit.capacitance == pytest.approx(c, rel=5e-3)


@settings(max_examples=40, deadline=None)
@given(log_r=st.floats(0.0, 5.0), log_c=st.floats(-15.0, -12.0))
def test_round_trip_property(log_r, log_c):
    r, c = 10**log_r, 10**log_c
    res = fit_off_model(rc_network(r, c))
    assert res.circuit.resistance == pytest.approx(r, rel=5e-3)
    assert res.circuit.capacitance == pytest.approx(c, rel=5e-3)


def test_noise_robustness():
    """0.05 dB (1 sigma) multiplicative noise on |S21|, 100 seeded trials."""
    clean = rc_network(22500.0, 65e-15)
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        gain = 10 ** (rng.normal(0.0, 0.05, FREQS.size) / 20)
        noisy = TwoPortNetwork(FREQS, clean.s11, clean.s21 * gain, clean.s12 * gain, clean.s22)
        res = fit_off_model(noisy)
        worst = max(worst, abs(res.circuit.resistance / 22500.0 - 1))
    assert worst < 0.05


class TestOnFit:
    @pytest.mark.parametrize(
        "il_db, expected",
        [(0.84, 10.153930954141499), (0.72, 8.642562361706553), (0.33, 3.872360242262185)],
    )
    def test_closed_form(self, il_db, expected):
        assert series_r_from_loss(il_db) == pytest.approx(expected, rel=1e-12)
        res = fit_on_resistance(magnitude_network(FREQS, il_db, 50.0))
        assert res.circuit.topology is Topology.SERIES_R
        assert res.circuit.resistance == pytest.approx(expected, rel=1e-9)
        assert res.residual_rms < 1e-12

    def test_rounded_targets(self):
        r = fit_on_resistance(magnitude_network(FREQS, 0.84, 50.0)).circuit.resistance
        assert r == pytest.approx(10.15, abs=0.01)
        r = fit_on_resistance(magnitude_network(FREQS, 0.33, 50.0)).circuit.resistance
        assert r == pytest.approx(3.87, abs=0.01)

    def test_unity_is_zero(self):
        data = switch_response((), EquivalentCircuit.series_r(0.0), FREQS)
        assert fit_on_resistance(data).circuit.resistance == 0.0

    def test_non_passive(self):
        data = magnitude_network(FREQS, -0.1, 50.0)
        with pytest.raises(NonPassiveData):
            fit_on_resistance(data)

    def test_small_capacitance_data(self):
        # omega R C < 0.01 across the band
        data = rc_network(10.0, 30e-15)
        assert 2 * math.pi * 4e9 * 10.0 * 30e-15 < 0.01
        assert fit_on_resistance(data).circuit.resistance == pytest.approx(10.0, rel=1e-2)


class TestCalibration:
    chip = ChipletGeometry()
    mat = SiliconMaterial()

    def laser(self, power, coupling=1.0):
        return LaserExcitation(power, 915e-9, SPOT, coupling)

    def test_fixed_point(self):
        r_full = switch_element(self.chip, self.laser(0.175), self.mat).resistance
        assert calibrate_coupling(r_full, self.laser(0.175), self.mat, self.chip) == 1.0

    def test_recovers_known_coupling(self):
        r = switch_element(self.chip, self.laser(0.175, 3e-4), self.mat).resistance
        c = calibrate_coupling(r, self.laser(0.175), self.mat, self.chip)
        assert c == pytest.approx(3e-4, rel=1e-6)

    def test_transfer_to_200mw(self):
        r175 = series_r_from_loss(0.84)
        c = calibrate_coupling(r175, self.laser(0.175), self.mat, self.chip)
        assert 0 < c <= 1
        r200 = switch_element(self.chip, self.laser(0.2, c), self.mat).resistance
        # photo conductance dominates: R scales as 1/P up to the 22.5 kOhm dark shunt
        g_dark = 1 / 22500.0
        expected = 1 / (g_dark + (1 / r175 - g_dark) * 200 / 175)
        assert r200 == pytest.approx(expected, rel=1e-6)
        assert r200 == pytest.approx(10.1539 * 175 / 200, rel=1e-3)
        il = 20 * math.log10(1 + r200 / 100)
        assert il == pytest.approx(0.738, abs=0.002)

    def test_linear_photo_conductance_after_calibration(self):
        c = calibrate_coupling(10.0, self.laser(0.175), self.mat, self.chip)
        g1 = photo_sheet_conductance(self.chip, self.laser(0.3, c), self.mat)
        g2 = photo_sheet_conductance(self.chip, self.laser(0.6, c), self.mat)
        assert g2 == pytest.approx(2 * g1, rel=1e-12)

    def test_out_of_range_reports_requirement(self):
        r_full = switch_element(self.chip, self.laser(0.175), self.mat).resistance
        with pytest.raises(OutOfRange) as info:
            calibrate_coupling(r_full / 2, self.laser(0.175), self.mat, self.chip)
        assert info.value.required > 1

    def test_above_dark_rejected(self):
        with pytest.raises(OutOfRange):
            calibrate_coupling(30000.0, self.laser(0.175), self.mat, self.chip)
