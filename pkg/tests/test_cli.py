import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qorlicz.channels import replacement_channel
from qorlicz.cli import main
from qorlicz.io import encode_channel

INPUTS = Path(__file__).resolve().parents[1] / "inputs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_young_eval(capsys):
    code, rep = run_json(capsys, "young", "eval", "--spec", INPUTS / "power_2.json", "--t", "3")
    assert code == 0 and rep["values"]["3.0"] == pytest.approx(9.0)


def test_young_indices_psi_e(capsys):
    code, rep = run_json(capsys, "young", "indices", "--spec", INPUTS / "psi_e.json")
    assert code == 0
    assert rep["upper"] == pytest.approx(0.5, abs=0.02) and rep["lower"] == pytest.approx(0.0, abs=0.02)


def test_young_equiv_text(capsys):
    code, out, _ = run(capsys, "young", "equiv", "--a", "cosh_minus_one", "--b", "psi_e")
    assert code == 0
    assert 'verdict: "EQUIVALENT"' in out and "b1:" in out and "RESULT: PASS" in out


def test_young_dilation_csv(capsys):
    code, out, _ = run(capsys, "young", "dilation", "--spec", "psi_e", "--points", "5", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["s", "dilation"] and len(rows) == 6
    assert float(rows[-1][1]) == pytest.approx(100.0, rel=1e-4)


def test_norm_steps_and_algebra(capsys):
    code, rep = run_json(capsys, "norm", "--spec", "power_2", "--steps", "1:1")
    assert code == 0 and rep["luxemburg"] == pytest.approx(1.0) and rep["orlicz"] == pytest.approx(2.0)
    code, rep = run_json(capsys, "norm", "--spec", "psi_e", "--algebra", INPUTS / "algebra.json",
                         "--element", INPUTS / "element.json")
    assert code == 0 and rep["luxemburg"] > 0


def test_dbc_identity_passes(capsys):
    code, rep = run_json(capsys, "dbc", "--channel", INPUTS / "identity_qubit.json",
                         "--state", INPUTS / "state_qubit.json")
    assert code == 0 and all(v["violation"] == 0 or v["violation"] < 1e-12 for v in rep["checks"].values())


def test_dbc_schur_fixture_passes(capsys):
    code, rep = run_json(capsys, "dbc", "--channel", INPUTS / "schur_qubit.json",
                         "--state", INPUTS / "state_qubit.json")
    assert code == 0 and rep["checks"]["dbc"]["violation"] <= 1e-9


def test_dbc_transpose_fails_at_level_two(capsys):
    code, rep = run_json(capsys, "dbc", "--channel", INPUTS / "transpose_qubit.json",
                         "--state", INPUTS / "state_tracial_qubit.json")
    assert code == 1
    assert rep["checks"]["cp_level_1"]["pass"] and not rep["checks"]["cp_level_2"]["pass"]
    assert not rep["checks"]["choi_positive"]["pass"] and rep["cones_agree_with_choi"]


def test_evolve_fixture_and_zero_generator(capsys):
    code, rep = run_json(capsys, "evolve", "--state", INPUTS / "state_qubit.json",
                         "--channel", INPUTS / "schur_qubit.json")
    assert code == 0 and rep["dirichlet"]["pass"] and rep["markov_all"] and rep["t2_residual"] <= 1e-8
    code, out, _ = run(capsys, "evolve", "--state", INPUTS / "state_qubit.json",
                       "--generator", INPUTS / "generator_zero.json", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][0] == "t"
    values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    assert np.allclose(values, values[0])
    assert values[0, 0] == pytest.approx(1.0)


def test_crossed_default_reports_literal_mu_bound_failure(capsys):
    code, rep = run_json(capsys, "crossed", "--samples", "50")
    assert code == 1
    checks = rep["checks"]
    assert checks["relations"]["pass"] and checks["trace_invariance"]["pass"] and checks["module_property"]["pass"]
    assert checks["mu_bound_dilated"]["pass"] and not checks["mu_bound"]["pass"]
    code, rep = run_json(capsys, "crossed", "--samples", "50",
                         "--checks", "relations,trace_invariance,module_property,mu_bound_dilated")
    assert code == 0


def test_crossed_degenerate_and_non_invariant(capsys):
    code, rep = run_json(capsys, "crossed", "--config", '{"q": 0.5, "N": 1, "m": [0, 1]}',
                         "--samples", "20", "--checks", "relations,trace_invariance,module_property")
    assert code == 0 and rep["dual_action_phases"] == [[0, [1.0, 0.0]]]
    cfg = {"q": 0.5, "N": 4, "m": [0, 1], "channel": encode_channel(replacement_channel(np.diag([0.2, 0.8])))}
    code, rep = run_json(capsys, "crossed", "--config", json.dumps(cfg), "--samples", "20",
                         "--checks", "trace_invariance")
    assert code == 1 and rep["checks"]["trace_invariance"]["violation"] > 1e-3


def test_report_subset(capsys):
    code, out, err = run(capsys, "report", "--criteria", "9,13")
    assert code == 0 and "criterion  9" in err and "criterion 13" in err


@pytest.mark.parametrize("argv", [
    ["crossed", "--samples", "20"],
    ["dbc", "--channel", str(INPUTS / "schur_qubit.json"), "--state", str(INPUTS / "state_qubit.json")],
    ["report", "--criteria", "9"],
])
def test_json_is_byte_identical(capsys, argv, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(argv + ["--format", "json", "--out", str(a)])
    main(argv + ["--format", "json", "--out", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["seed"] == 0 and "tol" in rep


@pytest.mark.parametrize("argv", [
    ["young", "eval", "--spec", '{"kind": "nope"}'],
    ["young", "eval", "--spec", '{"kind": "power", "params": {"p": 2}, "extra": 1}'],
    ["dbc", "--channel", str(INPUTS / "identity_qubit.json"), "--state", '{"rho": [[[1, 0]]], "x": 1}'],
    ["dbc", "--channel", '{"builtin": "identity", "n": 3}', "--state", str(INPUTS / "state_qubit.json")],
    ["crossed", "--config", '{"q": 2.0}'],
    ["crossed", "--checks", "nonsense", "--samples", "5"],
    ["norm", "--spec", "psi_e"],
    ["report", "--criteria", "14"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "input error" in err


def test_argparse_errors_exit_2():
    proc = subprocess.run([sys.executable, "-m", "qorlicz", "young", "frobnicate"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_module_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "qorlicz", "young", "eval", "--spec", "power_2", "--t", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "RESULT: PASS" in proc.stdout
