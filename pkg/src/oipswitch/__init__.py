"""Simulation and equivalent-circuit extraction for optically controlled
silicon plasma RF switches."""

from .carrier_physics import (
    CarrierProfile,
    LaserExcitation,
    SiliconMaterial,
    carrier_profile,
    conductivity_profile,
    excess_density,
    photon_flux,
)
from .circuit_fit import FitResult, calibrate_coupling, fit_off_model, fit_on_resistance
from .device_model import (
    ChipletGeometry,
    EquivalentCircuit,
    Provenance,
    Topology,
    gap_resistance,
    impedance,
    off_capacitance,
    sheet_conductance,
    switch_element,
)
from .rf_network import (
    AbcdMatrix,
    MicrostripLine,
    TwoPortNetwork,
    abcd_line,
    abcd_series,
    abcd_to_s,
    cascade,
    microstrip_analyze,
    microstrip_synthesize,
    s_to_abcd,
    switch_response,
)

__version__ = "0.1.0"
