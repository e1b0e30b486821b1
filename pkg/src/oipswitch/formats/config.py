"""Run configuration: a JSON document with unit-suffixed values.

Layout (every block is an object; unknown keys are rejected)::

    laser:       powers (list, or {start, stop, points}), wavelength,
                 spot_diameter, coupling_efficiency
    material:    any SiliconMaterial field
    chiplet:     gap_length, width, thickness, length, contact_resistance,
                 gap_capacitance, dark_resistance, resistance_override
    board:       substrate_epsilon, substrate_height, trace_width ("auto"
                 synthesises the reference impedance), copper_thickness,
                 line_length, loss_tangent, conductor_conductivity, losses,
                 reference_impedance
    sweep:       start, stop, points
    calibration: off_reference [{frequency, isolation_dB}, ...],
                 on_reference {power, insertion_loss_dB}
    output:      directory, touchstone_format, profile_points, integration_points
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..carrier_physics import LaserExcitation, SiliconMaterial
from ..device_model import DEFAULT_PROFILE_POINTS, ChipletGeometry
from ..errors import ConfigError
from ..rf_network import DEFAULT_REFERENCE_IMPEDANCE, MicrostripLine, microstrip_synthesize
from .units import parse_quantity

_MATERIAL_FIELDS = {
    "quantum_efficiency": "dimensionless",
    "absorption_coefficient": "inverse_length",
    "carrier_lifetime": "time",
    "diffusion_length": "length",
    "surface_velocity": "velocity",
    "surface_reflectance": "dimensionless",
    "electron_mobility": "mobility",
    "hole_mobility": "mobility",
    "dark_resistivity": "resistivity",
}


@dataclass(frozen=True)
class OffReference:
    frequency: float
    isolation_db: float


@dataclass(frozen=True)
class OnReference:
    power: float
    insertion_loss_db: float


@dataclass(frozen=True)
class RunConfig:
    powers: tuple[float, ...]
    wavelength: float
    spot_diameter: float
    coupling_efficiency: float
    material: SiliconMaterial
    chiplet: ChipletGeometry
    resistance_override: float | None
    board_line: MicrostripLine
    reference_impedance: float
    frequencies: np.ndarray
    off_reference: tuple[OffReference, ...] = ()
    on_reference: OnReference | None = None
    output_directory: str = "out"
    touchstone_format: str = "RI"
    profile_points: int = 201
    integration_points: int = DEFAULT_PROFILE_POINTS
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def laser(self, power: float, coupling: float | None = None) -> LaserExcitation:
        return LaserExcitation.from_spot_diameter(
            power,
            self.wavelength,
            self.spot_diameter,
            self.coupling_efficiency if coupling is None else coupling,
        )


class _Block:
    """Reads keys from one config object and tracks which ones were used."""

    def __init__(self, doc: Any, path: str, required: bool = True):
        if doc is None and not required:
            doc = {}
        if not isinstance(doc, dict):
            raise ConfigError("expected an object", path)
        self.doc = doc
        self.path = path
        self.used: set[str] = set()

    def key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def has(self, name: str) -> bool:
        return name in self.doc and self.doc[name] is not None

    def raw(self, name: str, default: Any = ...):
        self.used.add(name)
        if name not in self.doc or self.doc[name] is None:
            if default is ...:
                raise ConfigError("missing required key", self.key(name))
            return default
        return self.doc[name]

    def quantity(self, name: str, dimension: str, default: Any = ...):
        value = self.raw(name, default)
        if value is default and default is not ...:
            return default
        return parse_quantity(value, dimension, self.key(name))

    def block(self, name: str, required: bool = True) -> "_Block":
        self.used.add(name)
        if required and name not in self.doc:
            raise ConfigError("missing required block", self.key(name))
        return _Block(self.doc.get(name), self.key(name), required)

    def finish(self):
        unknown = sorted(set(self.doc) - self.used)
        if unknown:
            raise ConfigError("unknown key", self.key(unknown[0]))


def _powers(laser: _Block) -> tuple[float, ...]:
    raw = laser.raw("powers")
    key = laser.key("powers")
    if isinstance(raw, list):
        powers = [parse_quantity(p, "power", f"{key}[{i}]") for i, p in enumerate(raw)]
    elif isinstance(raw, dict):
        rng = _Block(raw, key)
        start = rng.quantity("start", "power")
        stop = rng.quantity("stop", "power")
        points = rng.raw("points")
        rng.finish()
        if not isinstance(points, int) or isinstance(points, bool) or points < 1:
            raise ConfigError("points must be a positive integer", rng.key("points"))
        powers = list(np.linspace(start, stop, points)) if points > 1 else [start]
    else:
        raise ConfigError("expected a list of powers or a {start, stop, points} range", key)
    if not powers:
        raise ConfigError("power list is empty", key)
    if any(p < 0 for p in powers):
        raise ConfigError("laser powers must be >= 0", key)
    return tuple(float(p) for p in powers)


def _positive_int(block: _Block, name: str, default: int, minimum: int) -> int:
    value = block.raw(name, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"must be an integer >= {minimum}", block.key(name))
    return value


def _wrap(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), path) from None


def parse_config(doc: Any) -> RunConfig:
    root = _Block(doc, "")

    laser = root.block("laser")
    powers = _powers(laser)
    wavelength = laser.quantity("wavelength", "length")
    spot_diameter = laser.quantity("spot_diameter", "length", 100e-6)
    coupling = laser.quantity("coupling_efficiency", "dimensionless", 1.0)
    laser.finish()
    _wrap("laser", LaserExcitation.from_spot_diameter, 0.0, wavelength, spot_diameter, coupling)

    mat_block = root.block("material", required=False)
    mat_kwargs = {
        name: mat_block.quantity(name, dim)
        for name, dim in _MATERIAL_FIELDS.items()
        if mat_block.has(name)
    }
    mat_block.finish()
    material = _wrap("material", SiliconMaterial, **mat_kwargs)

    chip = root.block("chiplet", required=False)
    chip_kwargs = {}
    for name in ("gap_length", "width", "thickness", "length"):
        if chip.has(name):
            chip_kwargs[name] = chip.quantity(name, "length")
    if chip.has("contact_resistance"):
        chip_kwargs["contact_resistance"] = chip.quantity("contact_resistance", "resistance")
    chip_kwargs["gap_capacitance_override"] = chip.quantity("gap_capacitance", "capacitance", None)
    chip_kwargs["dark_resistance_override"] = chip.quantity("dark_resistance", "resistance", None)
    resistance_override = chip.quantity("resistance_override", "resistance", None)
    chip.finish()
    chiplet = _wrap("chiplet", ChipletGeometry, **chip_kwargs)
    if resistance_override is not None and resistance_override < 0:
        raise ConfigError("must be >= 0", chip.key("resistance_override"))

    board = root.block("board", required=False)
    z_ref = board.quantity("reference_impedance", "resistance", DEFAULT_REFERENCE_IMPEDANCE)
    eps = board.quantity("substrate_epsilon", "dimensionless", 3.45)
    height = board.quantity("substrate_height", "length", 0.762e-3)
    copper = board.quantity("copper_thickness", "length", 17.5e-6)
    width_raw = board.raw("trace_width", "auto")
    length = board.quantity("line_length", "length", 15e-3)
    tand = board.quantity("loss_tangent", "dimensionless", 0.002)
    sigma_cu = board.quantity("conductor_conductivity", "conductivity", 5.8e7)
    losses = board.raw("losses", False)
    board.finish()
    if not isinstance(losses, bool):
        raise ConfigError("must be true or false", board.key("losses"))
    if not z_ref > 0:
        raise ConfigError("must be > 0", board.key("reference_impedance"))
    if width_raw == "auto":
        width = _wrap(board.key("trace_width"), microstrip_synthesize, eps, height, z_ref, copper)
    else:
        width = parse_quantity(width_raw, "length", board.key("trace_width"))
    line = _wrap(
        "board", MicrostripLine, eps, height, width, copper, length, tand, sigma_cu, losses
    )

    sweep = root.block("sweep")
    f_start = sweep.quantity("start", "frequency")
    f_stop = sweep.quantity("stop", "frequency")
    points = _positive_int(sweep, "points", 31, 2)
    sweep.finish()
    if not 0 < f_start < f_stop:
        raise ConfigError("need 0 < start < stop", sweep.key("start"))
    frequencies = np.linspace(f_start, f_stop, points)

    cal = root.block("calibration", required=False)
    off_refs = []
    off_raw = cal.raw("off_reference", [])
    if not isinstance(off_raw, list):
        raise ConfigError("expected a list of reference points", cal.key("off_reference"))
    for i, item in enumerate(off_raw):
        ref = _Block(item, f"{cal.key('off_reference')}[{i}]")
        off_refs.append(
            OffReference(
                ref.quantity("frequency", "frequency"),
                ref.quantity("isolation_dB", "dimensionless"),
            )
        )
        ref.finish()
    if len(off_refs) == 1:
        raise ConfigError("need at least two reference points", cal.key("off_reference"))
    on_ref = None
    if cal.has("on_reference"):
        ref = cal.block("on_reference")
        on_ref = OnReference(
            ref.quantity("power", "power"), ref.quantity("insertion_loss_dB", "dimensionless")
        )
        ref.finish()
        if not on_ref.power > 0:
            raise ConfigError("must be > 0", ref.key("power"))
    else:
        cal.used.add("on_reference")
    cal.finish()

    out = root.block("output", required=False)
    directory = out.raw("directory", "out")
    fmt = out.raw("touchstone_format", "RI")
    profile_points = _positive_int(out, "profile_points", 201, 2)
    integration_points = _positive_int(out, "integration_points", DEFAULT_PROFILE_POINTS, 2)
    out.finish()
    if not isinstance(directory, str) or not directory:
        raise ConfigError("must be a non-empty string", out.key("directory"))
    if fmt not in ("RI", "MA", "DB"):
        raise ConfigError("must be one of RI, MA, DB", out.key("touchstone_format"))

    root.finish()
    return RunConfig(
        powers=powers,
        wavelength=wavelength,
        spot_diameter=spot_diameter,
        coupling_efficiency=coupling,
        material=material,
        chiplet=chiplet,
        resistance_override=resistance_override,
        board_line=line,
        reference_impedance=z_ref,
        frequencies=frequencies,
        off_reference=tuple(off_refs),
        on_reference=on_ref,
        output_directory=directory,
        touchstone_format=fmt,
        profile_points=profile_points,
        integration_points=integration_points,
        raw=doc,
    )


def load_config(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(doc)
