"""End-to-end CLI checks: exit codes, file outputs, determinism, round-trips."""

import json

import numpy as np
import pytest

from effres.cli import main
from effres.config import config_to_ini, load_config


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--out", str(out)])
    return code, out


def read_json(path):
    return json.loads(path.read_text())


# -- resonances ------------------------------------------------------------------


def test_resonances_diamond_single_atom(tmp_path):
    code, out = run(tmp_path, "resonances", "--preset", "diamond", "--no-plots")
    assert code == 0
    doc = read_json(out / "resonances.json")
    assert doc["count"] == 6
    classes = [r["class"] for r in doc["rows"]]
    assert classes.count("explicit") == 4
    assert classes.count("multiphoton") == 1
    assert classes.count("photon-assisted") == 1


def test_resonances_diamond_two_atoms(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = diamond\natoms = 2\n")
    code, out = run(tmp_path, "resonances", "--config", str(cfg), "--no-plots")
    assert code == 0
    doc = read_json(out / "resonances.json")
    assert doc["count"] == 21
    lines = (out / "resonances.csv").read_text().splitlines()
    assert len(lines) == 22  # header + one row per condition


def test_resonances_two_level_single_row(tmp_path):
    code, out = run(tmp_path, "resonances", "--preset", "dicke-rwa", "--no-plots")
    assert code == 0
    doc = read_json(out / "resonances.json")
    assert doc["count"] == 1
    assert doc["rows"][0]["class"] == "explicit"


def test_resonances_emits_figure(tmp_path):
    code, out = run(tmp_path, "resonances", "--preset", "diamond")
    assert code == 0
    assert (out / "resonances.png").exists()


# -- effective -------------------------------------------------------------------


def test_effective_nonrwa_terms(tmp_path):
    code, out = run(tmp_path, "effective", "--preset", "dicke-nonrwa",
                    "--no-plots")
    assert code == 0
    doc = read_json(out / "effective.json")
    pairs = {(t["k"], t["l"]) for t in doc["terms"]}
    assert pairs == {(1, 0), (1, 1), (1, 2), (2, 1)}
    assert all(t["k"] < 3 for t in doc["terms"])


def test_effective_classical_only_odd(tmp_path):
    code, out = run(tmp_path, "effective", "--preset", "dicke-classical",
                    "--no-plots")
    assert code == 0
    doc = read_json(out / "effective.json")
    assert all(t["k"] == 1 for t in doc["terms"])
    assert all(t["photon_order"] % 2 == 1 for t in doc["terms"])


def test_effective_zero_coupling_empty_terms(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = dicke-nonrwa\ncoupling = 0.0\n")
    code, out = run(tmp_path, "effective", "--config", str(cfg), "--no-plots")
    assert code == 0
    assert read_json(out / "effective.json")["terms"] == []


def test_effective_resonant_dicke_rwa_refused(tmp_path):
    code, _ = run(tmp_path, "effective", "--preset", "dicke-rwa", "--no-plots")
    assert code == 3  # default dicke-rwa preset is exactly on resonance


def test_effective_dispersive_detuned(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = dicke-rwa\nomega_atom = 2.0\n"
                   "coupling = 0.02\n")
    code, out = run(tmp_path, "effective", "--config", str(cfg), "--no-plots")
    assert code == 0
    doc = read_json(out / "effective.json")
    assert doc["kind"] == "dispersive-diagonal"
    assert doc["parameters"]["detuning"] == pytest.approx(1.0)


def test_effective_diamond_resonant_channel_exit3(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = diamond\nomega = 0.9\n")
    code, _ = run(tmp_path, "effective", "--config", str(cfg), "--no-plots")
    assert code == 3


def test_effective_diamond_coefficients(tmp_path):
    code, out = run(tmp_path, "effective", "--preset", "diamond", "--no-plots")
    assert code == 0
    doc = read_json(out / "effective.json")
    eps = doc["parameters"]["epsilons"]
    assert doc["coefficients"]["photon_assisted_23_via_1"] == pytest.approx(
        0.0024 * eps[0])


# -- scan ---------------------------------------------------------------------------


SCAN_INI = """\
[model]
preset = dicke-nonrwa

[task]
grid_start = 2.996
grid_stop = 3.001
grid_points = 30
truncation_check = {check}
"""


def test_scan_nonrwa_finds_shifted_peak(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(SCAN_INI.format(check="true"))
    code, out = run(tmp_path, "scan", "--config", str(cfg), "--no-plots")
    assert code == 0  # not truncation limited at n_max = 14
    doc = read_json(out / "peaks.json")
    assert doc["truncation_limited"] is False
    peak = doc["peaks"][0]
    assert peak["found"] is True
    assert peak["relative_error"] < 1e-4
    assert abs(peak["measured"] - 2.9988) < 2e-4


def test_scan_empty_grid_exit2(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = dicke-nonrwa\n\n[task]\n"
                   "grid_start = 3.0\ngrid_stop = 3.0\ngrid_points = 0\n")
    code, _ = run(tmp_path, "scan", "--config", str(cfg), "--no-plots")
    assert code == 2


def test_scan_classical_transition_mode(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = dicke-classical\n\n[task]\n"
                   "grid_start = 0.98\ngrid_stop = 1.03\ngrid_points = 16\n"
                   "truncation_check = false\nsteps_per_period = 600\n")
    code, out = run(tmp_path, "scan", "--config", str(cfg), "--no-plots")
    assert code == 0
    doc = read_json(out / "peaks.json")
    assert doc["value"] == "max_transition_probability"
    assert any(p["found"] and p["strength"] > 0.9 for p in doc["peaks"])


def test_scan_diamond_explicit_crossing(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = diamond\nn_max = 4\n\n[task]\n"
                   "grid_start = 1.05\ngrid_stop = 1.15\ngrid_points = 21\n"
                   "state_a = level:2,n:1\nstate_b = level:4,n:0\n"
                   "truncation_check = false\n")
    code, out = run(tmp_path, "scan", "--config", str(cfg), "--no-plots")
    assert code == 0
    peak = read_json(out / "peaks.json")["peaks"][0]
    assert peak["found"] and abs(peak["predicted"] - 1.1) < 1e-9


def test_scan_figure_rendered(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(SCAN_INI.format(check="false"))
    code, out = run(tmp_path, "scan", "--config", str(cfg))
    assert code == 0
    assert (out / "scan.png").exists()


# -- evolve -----------------------------------------------------------------------


def test_evolve_resonant_rwa_full_transfer(tmp_path):
    code, out = run(tmp_path, "evolve", "--preset", "dicke-rwa", "--no-plots",
                    "--seedless")
    assert code == 0
    doc = read_json(out / "evolution.json")
    assert doc["extrema"]["p_target"]["max"] >= 0.999
    assert doc["norm_drift"] <= 1e-9
    header = (out / "evolution.csv").read_text().splitlines()[0]
    assert header.split(",")[0] == "time"
    assert "p_target" in header


def test_evolve_classical_periodic(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = dicke-classical\nomega_atom = 1.000625\n"
                   "\n[task]\nhorizon = 66.0\nsteps = 120\n"
                   "steps_per_period = 700\n")
    code, out = run(tmp_path, "evolve", "--config", str(cfg), "--no-plots")
    assert code == 0
    doc = read_json(out / "evolution.json")
    assert doc["extrema"]["p_target"]["max"] >= 0.95


def test_evolve_photon_overflow_exit2(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = dicke-rwa\nn_max = 4\n\n[task]\n"
                   "initial = excited,9\n")
    code, _ = run(tmp_path, "evolve", "--config", str(cfg), "--no-plots")
    assert code == 2


# -- config handling ----------------------------------------------------------------


def test_unknown_key_rejected_with_line(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = diamond\nbogus = 1\n")
    code, _ = run(tmp_path, "resonances", "--config", str(cfg), "--no-plots")
    assert code == 2
    err = capsys.readouterr().err
    assert "bogus" in err
    assert ":3" in err  # the offending line


def test_unknown_section_rejected(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = diamond\n\n[extras]\nx = 1\n")
    code, _ = run(tmp_path, "resonances", "--config", str(cfg), "--no-plots")
    assert code == 2


def test_unknown_preset_rejected(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = qubit-farm\n")
    code, _ = run(tmp_path, "resonances", "--config", str(cfg), "--no-plots")
    assert code == 2


def test_missing_config_file_exit2(tmp_path):
    code, _ = run(tmp_path, "resonances", "--config",
                  str(tmp_path / "nope.ini"), "--no-plots")
    assert code == 2


def test_byte_identical_reruns(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = diamond\natoms = 2\n")
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["resonances", "--config", str(cfg), "--out", str(out1),
                 "--no-plots"]) == 0
    assert main(["resonances", "--config", str(cfg), "--out", str(out2),
                 "--no-plots"]) == 0
    assert (out1 / "resonances.csv").read_bytes() == (out2 / "resonances.csv").read_bytes()
    assert (out1 / "resonances.json").read_bytes() == (out2 / "resonances.json").read_bytes()


def test_config_round_trip_reproduces_report(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(SCAN_INI.format(check="false"))
    out1 = tmp_path / "first"
    assert main(["scan", "--config", str(cfg), "--out", str(out1),
                 "--no-plots"]) == 0
    resolved = read_json(out1 / "peaks.json")["config"]
    cfg2 = tmp_path / "replay.ini"
    cfg2.write_text(config_to_ini(resolved))
    out2 = tmp_path / "second"
    assert main(["scan", "--config", str(cfg2), "--out", str(out2),
                 "--no-plots"]) == 0
    assert (out1 / "scan.csv").read_bytes() == (out2 / "scan.csv").read_bytes()
    assert (read_json(out2 / "peaks.json")["peaks"]
            == read_json(out1 / "peaks.json")["peaks"])


def test_load_config_defaults_without_file():
    cfg = load_config(None, preset="dicke-nonrwa")
    assert cfg.model["omega_atom"] == "3.0"
    assert cfg.preset == "dicke-nonrwa"


def test_evolve_truncation_limited_exit4(tmp_path):
    """Strong counter-rotating coupling on a tiny Fock space leaks past the
    interior mask: results are still written but flagged with exit 4."""
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\npreset = dicke-nonrwa\ncoupling = 0.3\n"
                   "n_max = 2\n\n[task]\nhorizon = 40\nsteps = 200\n"
                   "target = ground,1\n")
    code, out = run(tmp_path, "evolve", "--config", str(cfg), "--no-plots")
    assert code == 4
    doc = read_json(out / "evolution.json")
    assert doc["truncation_limited"] is True
    assert (out / "evolution.csv").exists()
