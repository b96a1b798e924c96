import csv
import io
import json
import subprocess
import sys

import pytest

from qprep.cli import main

GAUSS = '{"kind": "gaussian", "mu": 0, "sigma": 1}'
BINOM = '{"kind": "binomial", "l": 7, "p": 0.5}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_synth_gaussian(capsys):
    code, out, _ = run(capsys, "synth", "--dist", GAUSS, "--qubits", "3", "--window", "12")
    doc = json.loads(out)
    assert code == 0 and doc["version"] == 1
    assert [g["kind"] for g in doc["gates"]] == ["ry"] * 7


def test_synth_binomial(capsys):
    code, out, _ = run(capsys, "synth", "--dist", BINOM, "--qubits", "4")
    gates = json.loads(out)["gates"]
    assert code == 0
    assert sum(g["kind"] == "h" for g in gates) == 3
    assert sum(g["kind"] == "ry" and len(g["controls"]) == 3 for g in gates) == 8


def test_fork_outputs_layout(capsys):
    code, out, _ = run(capsys, "fork", "--dist", GAUSS, "--qubits", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["layout"]["d"] == 7 and doc["layout"]["output_register"] == [0, 1, 3]
    assert doc["fork_report"]["rotation_depth"] == 1


def test_synth_files(tmp_path, capsys):
    paths = {k: tmp_path / f"out.{k}" for k in ("json", "qasm", "angles")}
    code, out, _ = run(capsys, "synth", "--dist", GAUSS, "--qubits", "3", "--lower",
                       "--json", str(paths["json"]), "--qasm", str(paths["qasm"]),
                       "--emit-angles", str(paths["angles"]))
    assert code == 0 and out == ""
    assert paths["qasm"].read_text().startswith("OPENQASM 3.0;")
    assert json.loads(paths["angles"].read_text())["n"] == 3
    gates = json.loads(paths["json"].read_text())["gates"]
    assert all(len(g["controls"]) <= 1 for g in gates)


def test_determinism(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"c{k}.qasm"
        run(capsys, "synth", "--dist", GAUSS, "--qubits", "5", "--zeta-seed", "17", "--qasm", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("dist", [GAUSS, '{"kind": "laplace", "mu": 0, "b": 1}', BINOM])
def test_verify_passes_silently(dist, capsys):
    code, out, err = run(capsys, "verify", "--dist", dist, "--qubits", "4" if "binomial" in dist else "3")
    assert (code, out, err) == (0, "", "")


def test_verify_forked(capsys):
    assert run(capsys, "verify", "--dist", GAUSS, "--qubits", "4", "--fork")[0] == 0


def test_verify_cauchy_small_window(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--dist", '{"kind": "cauchy", "x0": 0, "gamma": 1}',
                     "--qubits", "3", "--window", "4", "--json", str(path))
    report = json.loads(path.read_text())
    assert code == 0 and report["tvd"] < 1e-10
    assert report["wrap_error_estimate"] > 0.1


def test_verify_tolerance_exit(capsys):
    code, _, err = run(capsys, "verify", "--dist", GAUSS, "--qubits", "3", "--max-tvd", "-1")
    assert code == 4 and "tvd" in err


def test_simulate_csv(tmp_path, capsys):
    path = tmp_path / "p.csv"
    assert run(capsys, "simulate", "--dist", GAUSS, "--qubits", "3", "--csv", str(path))[0] == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["index", "x", "prob"] and len(rows) == 9
    assert abs(sum(float(r[2]) for r in rows[1:]) - 1) < 1e-12


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--dist", GAUSS, "--window", "12", "--n-min", "2",
                       "--n-max", "10")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    dxs = [float(r["delta_x"]) for r in rows]
    assert all(b == a / 2 for a, b in zip(dxs, dxs[1:]))
    gaps = [abs(float(r["delta_x_norm"]) / float(r["delta_x"]) - 1) for r in rows]
    # beyond n = 5 the gap is at rounding level
    assert all(b <= a + 1e-13 for a, b in zip(gaps, gaps[1:]))
    assert all(float(r["tvd"]) < 1e-10 for r in rows)


@pytest.mark.parametrize("argv", [
    ["synth", "--dist", '{"kind": "gaussian", "mean": 0}', "--qubits", "3"],
    ["synth", "--dist", "not json", "--qubits", "3"],
    ["synth", "--dist", GAUSS],
    ["synth", "--dist", GAUSS, "--qubits", "3", "--zeta", "0.5"],
    ["synth", "--dist", BINOM, "--qubits", "3"],
    ["sweep", "--dist", GAUSS, "--n-min", "4", "--n-max", "2"],
])
def test_config_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_budget_exit(monkeypatch, capsys):
    monkeypatch.setenv("QPREP_MAX_QUBITS", "4")
    assert run(capsys, "verify", "--dist", GAUSS, "--qubits", "5")[0] == 3
    assert run(capsys, "verify", "--dist", GAUSS, "--qubits", "4")[0] == 0


def test_fork_budget_exit(capsys):
    assert run(capsys, "verify", "--dist", GAUSS, "--qubits", "5", "--fork")[0] == 3


def test_dist_from_file(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(GAUSS)
    assert run(capsys, "synth", "--dist", str(path), "--qubits", "2")[0] == 0


def test_console_entry():
    res = subprocess.run([sys.executable, "-m", "qprep.cli", "verify", "--dist", GAUSS, "--qubits", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == ""
