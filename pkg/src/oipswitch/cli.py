"""Command-line front end.

Every command reads one file (a JSON run config, or an ``.s2p`` for
``fit``) and writes its artifacts into a single output directory. Exit
codes: 0 success, 1 input or physics error, 2 fit did not converge.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .carrier_physics import carrier_profile, conductivity_profile
from .circuit_fit import fit_off_model, fit_on_resistance
from .errors import OipSwitchError
from .formats.config import RunConfig, load_config
from .formats.tables import write_profile_csv, write_summary_csv, write_sweep_csv
from .formats.touchstone import read_touchstone, write_touchstone
from .formats.units import parse_quantity
from .pipeline import CalibratedModel, calibrate, sweep_rows
from .rf_network import MicrostripLine, microstrip_analyze, microstrip_synthesize

OUTPUT_ENV = "OIPSWITCH_OUTPUT_DIR"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


@dataclass
class CommandOutcome:
    exit_code: int = EXIT_OK
    artifacts_written: list[Path] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)


def _output_dir(configured: str | os.PathLike) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or configured)


def _write(outcome: CommandOutcome, directory: Path, name: str, text: str) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    outcome.artifacts_written.append(path)
    return path


def _power_label(power: float) -> str:
    mw = round(power * 1e3, 9)
    return format(mw, "g").replace(".", "p") + "mW"


def _load(config_path: str | os.PathLike) -> RunConfig:
    try:
        text = Path(config_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OipSwitchError(f"cannot read config {config_path}: {exc.strerror}") from None
    return load_config(text)


def _model_lines(model: CalibratedModel) -> list[str]:
    lines = [f"dark R = {model.dark_resistance:.6g} ohm"]
    lines.append(f"coupling efficiency = {model.coupling_efficiency:.9g}")
    if model.off_fit is not None:
        c = model.off_fit.circuit
        lines.append(
            f"OFF fit: R = {c.resistance:.6g} ohm, C = {c.capacitance * 1e15:.6g} fF "
            f"(residual {model.off_fit.residual_rms:.3g})"
        )
    if model.on_fit is not None:
        lines.append(f"ON reference: R = {model.on_fit.circuit.resistance:.6g} ohm")
    return lines


def cmd_simulate(config_path) -> CommandOutcome:
    outcome = CommandOutcome()
    cfg = _load(config_path)
    out_dir = _output_dir(cfg.output_directory)
    model = calibrate(cfg)
    outcome.summary.extend(_model_lines(model))

    f_lo, f_hi = cfg.frequencies[0], cfg.frequencies[-1]
    header = [
        "power_mW",
        "R_ohm",
        "C_fF",
        f"il_dB_{f_lo / 1e9:g}GHz",
        f"il_dB_{f_hi / 1e9:g}GHz",
        f"rl_dB_{f_lo / 1e9:g}GHz",
        f"rl_dB_{f_hi / 1e9:g}GHz",
    ]
    rows = []
    for power in cfg.powers:
        element = model.element(power)
        net = model.response(power)
        comments = [
            f"laser power {power * 1e3:g} mW",
            f"element R = {element.resistance:.9g} ohm, C = {element.capacitance:.9g} F",
        ]
        _write(outcome, out_dir, f"switch_{_power_label(power)}.s2p",
               write_touchstone(net, cfg.touchstone_format, comments))
        il, rl = net.insertion_loss_db, net.return_loss_db
        rows.append([power * 1e3, element.resistance, element.capacitance * 1e15,
                     il[0], il[-1], rl[0], rl[-1]])
        outcome.summary.append(
            f"P = {power * 1e3:g} mW: R = {element.resistance:.6g} ohm, "
            f"IL {il[0]:.3f} dB @ {f_lo / 1e9:g} GHz, {il[-1]:.3f} dB @ {f_hi / 1e9:g} GHz"
        )
    _write(outcome, out_dir, "summary.csv", write_summary_csv(header, rows))
    return outcome


def cmd_sweep(config_path) -> CommandOutcome:
    outcome = CommandOutcome()
    cfg = _load(config_path)
    model = calibrate(cfg)
    outcome.summary.extend(_model_lines(model))
    rows = sweep_rows(model)
    _write(outcome, _output_dir(cfg.output_directory), "sweep.csv", write_sweep_csv(rows))
    outcome.summary.append(f"{len(rows)} rows ({len(cfg.powers)} powers x {len(cfg.frequencies)} frequencies)")
    return outcome


def cmd_fit(s2p_path, topology: str = "off", *, magnitude_only: bool = False,
            output_dir: str | os.PathLike = ".") -> CommandOutcome:
    outcome = CommandOutcome()
    path = Path(s2p_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OipSwitchError(f"cannot read {path}: {exc.strerror}") from None
    data = read_touchstone(text)
    if topology == "on":
        result = fit_on_resistance(data)
    elif topology == "off":
        result = fit_off_model(data, magnitude_only=magnitude_only)
    else:
        raise OipSwitchError(f"unknown topology {topology!r}")
    c = result.circuit
    report = {
        "source": path.name,
        "topology": c.topology.value,
        "resistance_ohm": c.resistance,
        "capacitance_F": c.capacitance,
        "residual_rms": result.residual_rms,
        "iterations": result.iterations,
        "converged": result.converged,
        "note": result.note,
    }
    _write(outcome, _output_dir(output_dir), f"{path.stem}_fit.json",
           json.dumps(report, indent=2, sort_keys=True) + "\n")
    outcome.summary.append(f"R = {c.resistance:.6g} ohm")
    if c.capacitance is not None:
        outcome.summary.append(f"C = {c.capacitance * 1e15:.6g} fF")
    outcome.summary.append(f"residual rms = {result.residual_rms:.3g}")
    outcome.summary.append(f"converged = {result.converged} after {result.iterations} iterations")
    if result.note:
        outcome.summary.append(result.note)
    if not result.converged:
        outcome.exit_code = EXIT_NOT_CONVERGED
    return outcome


def cmd_synth_line(epsilon: float, height, z0: float) -> CommandOutcome:
    outcome = CommandOutcome()
    h = parse_quantity(height, "length", "height")
    try:
        width = microstrip_synthesize(float(epsilon), h, float(z0))
    except ValueError as exc:
        raise OipSwitchError(str(exc)) from None
    z_check, eps_eff = microstrip_analyze(
        MicrostripLine(substrate_epsilon=float(epsilon), substrate_height=h,
                       trace_width=width, copper_thickness=0.0)
    )
    outcome.summary += [
        f"width = {width * 1e3:.6f} mm (w/h = {width / h:.6f})",
        f"eps_eff = {eps_eff:.6f}",
        f"Z0 check = {z_check:.6f} ohm",
    ]
    return outcome


def cmd_profile(config_path) -> CommandOutcome:
    outcome = CommandOutcome()
    cfg = _load(config_path)
    model = calibrate(cfg)
    out_dir = _output_dir(cfg.output_directory)
    for power in cfg.powers:
        laser = cfg.laser(power, model.coupling_efficiency)
        profile = carrier_profile(laser, cfg.material, model.chiplet.thickness, cfg.profile_points)
        sigma = conductivity_profile(profile, cfg.material)
        _write(outcome, out_dir, f"profile_{_power_label(power)}.csv", write_profile_csv(profile, sigma))
        outcome.summary.append(
            f"P = {power * 1e3:g} mW: n(0) = {profile.densities[0] * 1e-6:.4e} cm^-3"
        )
    return outcome


def build_parser() -> argparse.ArgumentParser:
    env_note = (
        f"Environment: {OUTPUT_ENV} overrides the output directory of every command."
    )
    parser = argparse.ArgumentParser(
        prog="oipswitch",
        description="Optically controlled silicon plasma switch: simulation and circuit extraction.",
        epilog=env_note,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="write one .s2p per laser power plus summary.csv",
                       epilog=env_note)
    p.add_argument("config", help="JSON run configuration")

    p = sub.add_parser("sweep", help="write sweep.csv over all powers and frequencies",
                       epilog=env_note)
    p.add_argument("config", help="JSON run configuration")

    p = sub.add_parser("fit", help="extract an equivalent circuit from a .s2p file",
                       epilog=env_note)
    p.add_argument("s2p", help="Touchstone v1 two-port file")
    p.add_argument("--topology", choices=("off", "on"), default="off",
                   help="off: R parallel C (simplex fit); on: series R (closed form). Default: off")
    p.add_argument("--magnitude-only", action="store_true",
                   help="fit |S| only, ignoring phase (off topology)")
    p.add_argument("--output-dir", default=".",
                   help="directory for the <name>_fit.json report (default: current directory)")

    p = sub.add_parser("synth-line", help="width of a microstrip for a target impedance",
                       epilog=env_note)
    p.add_argument("epsilon", type=float, help="substrate relative permittivity")
    p.add_argument("height", help="substrate height, e.g. '30 mil' or '0.762 mm' (bare number: metres)")
    p.add_argument("z0", type=float, help="target characteristic impedance in ohms, 10..200")

    p = sub.add_parser("profile", help="write n(z) and sigma(z) tables per laser power",
                       epilog=env_note)
    p.add_argument("config", help="JSON run configuration")
    return parser


def run(argv: list[str] | None = None) -> CommandOutcome:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config)
        if args.command == "sweep":
            return cmd_sweep(args.config)
        if args.command == "fit":
            return cmd_fit(args.s2p, args.topology, magnitude_only=args.magnitude_only,
                           output_dir=args.output_dir)
        if args.command == "synth-line":
            return cmd_synth_line(args.epsilon, args.height, args.z0)
        return cmd_profile(args.config)
    except OipSwitchError as exc:
        return CommandOutcome(EXIT_ERROR, [], [f"error: {type(exc).__name__}: {exc}"])


def main(argv: list[str] | None = None) -> int:
    outcome = run(argv)
    stream = sys.stdout if outcome.exit_code == EXIT_OK else sys.stderr
    for line in outcome.summary:
        print(line, file=stream)
    for path in outcome.artifacts_written:
        print(f"wrote {path}", file=stream)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
