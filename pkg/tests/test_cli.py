import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from oipswitch.cli import OUTPUT_ENV, build_parser, main, run
from oipswitch.device_model import EquivalentCircuit
from oipswitch.formats.touchstone import read_touchstone, write_touchstone
from oipswitch.rf_network import TwoPortNetwork, switch_response

FREQS = np.linspace(1e9, 4e9, 31)


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestSimulate:
    def test_writes_per_power_files(self, default_doc, write_config, tmp_path):
        out = run(["simulate", str(write_config(default_doc))])
        assert out.exit_code == 0
        names = sorted(p.name for p in (tmp_path / "out").iterdir())
        assert names == ["summary.csv", "switch_0mW.s2p", "switch_1500mW.s2p",
                         "switch_175mW.s2p", "switch_200mW.s2p"]
        assert any(line.startswith("dark R =") for line in out.summary)

    def test_dark_isolation_at_1ghz(self, default_doc, write_config, tmp_path):
        run(["simulate", str(write_config(default_doc))])
        net = read_touchstone((tmp_path / "out" / "switch_0mW.s2p").read_text())
        assert net.insertion_loss_db[0] == pytest.approx(27.0, abs=1e-3)
        assert net.insertion_loss_db[-1] == pytest.approx(17.0, abs=1e-3)

    def test_forced_zero_resistance(self, default_doc, write_config, tmp_path):
        default_doc["chiplet"]["resistance_override"] = "0 ohm"
        assert run(["simulate", str(write_config(default_doc))]).exit_code == 0
        rows = read_csv(tmp_path / "out" / "summary.csv")
        for row in rows:
            assert row["il_dB_1GHz"] == "0.000000"
            assert row["il_dB_4GHz"] == "0.000000"

    def test_deterministic(self, default_doc, write_config, tmp_path):
        path = write_config(default_doc)
        run(["simulate", str(path)])
        first = snapshot(tmp_path / "out")
        run(["simulate", str(path)])
        assert snapshot(tmp_path / "out") == first

    def test_env_override(self, default_doc, write_config, tmp_path, monkeypatch):
        target = tmp_path / "elsewhere"
        monkeypatch.setenv(OUTPUT_ENV, str(target))
        out = run(["simulate", str(write_config(default_doc))])
        assert out.exit_code == 0
        assert (target / "summary.csv").exists()
        assert not (tmp_path / "out").exists()
        assert all(p.parent == target for p in out.artifacts_written)

    def test_bad_config_exit_1(self, default_doc, write_config):
        default_doc["laser"]["bogus"] = 1
        out = run(["simulate", str(write_config(default_doc))])
        assert out.exit_code == 1
        assert "laser.bogus" in out.summary[0]

    def test_missing_file(self, tmp_path):
        assert run(["simulate", str(tmp_path / "nope.json")]).exit_code == 1


class TestSweep:
    def test_rows_and_monotonicity(self, default_doc, write_config, tmp_path):
        assert run(["sweep", str(write_config(default_doc))]).exit_code == 0
        rows = read_csv(tmp_path / "out" / "sweep.csv")
        assert len(rows) == 4 * 31
        by_freq = {}
        for r in rows:
            by_freq.setdefault(r["freq_GHz"], []).append((float(r["power_mW"]), float(r["il_dB"])))
        for series in by_freq.values():
            series.sort()
            il = [v for _, v in series]
            assert all(b <= a for a, b in zip(il, il[1:]))

    def test_1500mw_meets_abstract_bound(self, default_doc, write_config, tmp_path):
        run(["sweep", str(write_config(default_doc))])
        rows = [r for r in read_csv(tmp_path / "out" / "sweep.csv") if r["power_mW"] == "1500.000000"]
        assert rows and all(float(r["il_dB"]) <= 0.33 for r in rows)

    def test_byte_identical(self, default_doc, write_config, tmp_path):
        path = write_config(default_doc)
        run(["sweep", str(path)])
        first = (tmp_path / "out" / "sweep.csv").read_bytes()
        run(["sweep", str(path)])
        assert (tmp_path / "out" / "sweep.csv").read_bytes() == first

    def test_empty_powers(self, default_doc, write_config):
        default_doc["laser"]["powers"] = []
        out = run(["sweep", str(write_config(default_doc))])
        assert out.exit_code == 1
        assert "ConfigError" in out.summary[0]


class TestFit:
    def test_off_round_trip(self, tmp_path):
        net = switch_response((), EquivalentCircuit.r_par_c(22500.0, 65e-15), FREQS)
        s2p = tmp_path / "off.s2p"
        s2p.write_text(write_touchstone(net, "RI"))
        out = run(["fit", str(s2p), "--output-dir", str(tmp_path / "rep")])
        assert out.exit_code == 0
        report = json.loads((tmp_path / "rep" / "off_fit.json").read_text())
        assert report["resistance_ohm"] == pytest.approx(22500.0, rel=5e-3)
        assert report["capacitance_F"] == pytest.approx(65e-15, rel=5e-3)
        assert report["converged"] is True

    def test_on_flat_loss(self, tmp_path):
        s2p = tmp_path / "on.s2p"
        t = np.full(31, 10 ** (-0.84 / 20))
        s2p.write_text(write_touchstone(TwoPortNetwork(FREQS, np.zeros(31), t, t, np.zeros(31)), "DB"))
        out = run(["fit", str(s2p), "--topology", "on", "--output-dir", str(tmp_path)])
        assert out.exit_code == 0
        report = json.loads((tmp_path / "on_fit.json").read_text())
        assert report["resistance_ohm"] == pytest.approx(10.15, abs=0.01)

    def test_non_passive(self, tmp_path):
        s2p = tmp_path / "gain.s2p"
        s2p.write_text("# GHz S MA R 50\n1 0 0 1.2 0 1.2 0 0 0\n")
        out = run(["fit", str(s2p), "--topology", "on", "--output-dir", str(tmp_path)])
        assert out.exit_code == 1
        assert "NonPassiveData" in out.summary[0]

    def test_not_converged_exit_2(self, tmp_path, monkeypatch):
        import oipswitch.circuit_fit as cf

        original = cf.fit_off_model
        monkeypatch.setattr("oipswitch.cli.fit_off_model", lambda d, **k: original(d, max_iterations=3, **k))
        net = switch_response((), EquivalentCircuit.r_par_c(1e3, 1e-13), FREQS)
        s2p = tmp_path / "slow.s2p"
        s2p.write_text(write_touchstone(net))
        out = run(["fit", str(s2p), "--output-dir", str(tmp_path)])
        assert out.exit_code == 2
        assert (tmp_path / "slow_fit.json").exists()


class TestSynthLine:
    def test_30mil_board(self):
        out = run(["synth-line", "3.45", "30 mil", "50"])
        assert out.exit_code == 0
        width_mm = float(out.summary[0].split()[2])
        assert width_mm == pytest.approx(1.74, abs=0.01)

    def test_air(self):
        out = run(["synth-line", "1.0", "1 mm", "50"])
        assert out.exit_code == 0
        assert out.summary[1] == "eps_eff = 1.000000"

    def test_out_of_range(self):
        out = run(["synth-line", "3.45", "30 mil", "500"])
        assert out.exit_code == 1
        assert "outside" in out.summary[0]


class TestProfile:
    def test_columns_and_linearity(self, default_doc, write_config, tmp_path):
        default_doc["laser"]["powers"] = ["0 mW", "100 mW", "200 mW"]
        assert run(["profile", str(write_config(default_doc))]).exit_code == 0
        zero = read_csv(tmp_path / "out" / "profile_0mW.csv")
        p1 = read_csv(tmp_path / "out" / "profile_100mW.csv")
        p2 = read_csv(tmp_path / "out" / "profile_200mW.csv")
        assert list(zero[0]) == ["z_um", "n_per_cm3", "sigma_S_per_m"]
        assert all(float(r["n_per_cm3"]) == 0.0 for r in zero)
        assert all(float(r["sigma_S_per_m"]) == pytest.approx(1 / 30.0, rel=1e-9) for r in zero)
        assert all(float(r["n_per_cm3"]) >= 0 for r in p1)
        for a, b in zip(p1, p2):
            assert float(b["n_per_cm3"]) == pytest.approx(2 * float(a["n_per_cm3"]), rel=1e-8)


@pytest.mark.parametrize("command", [[], ["simulate"], ["sweep"], ["fit"], ["synth-line"], ["profile"]])
def test_help_exits_zero(command, capsys):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(command + ["--help"])
    assert info.value.code == 0
    text = capsys.readouterr().out
    assert OUTPUT_ENV in text


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "oipswitch", "synth-line", "3.45", "0.762 mm", "50"],
        capture_output=True, text=True, cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert "width = 1.7" in proc.stdout


def test_main_returns_exit_code(capsys):
    assert main(["synth-line", "3.45", "30 mil", "500"]) == 1
    assert "error" in capsys.readouterr().err
