import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from collapsesim.cli import main

EXPERIMENTS = {
    "schema_version": 1,
    "experiments": [
        {"name": "molecule interferometer", "kind": "interferometric", "n_nucleons": 25000,
         "geometry": {"size": 5e-9, "spacing": 3e-10}, "separation": 2.7e-7, "duration": 1e-3,
         "observable_limit": 0.5},
        {"name": "cantilever", "kind": "heating", "mass": 1e-14, "duration": 100.0, "observable_limit": 1e-20},
    ],
}

RUNS = {
    "noise-white": ["noise-gen", "--steps", "50", "--points", "8"],
    "noise-colored": ["noise-gen", "--kind", "exponential", "--omega-c", "3", "--steps", "50", "--increments"],
    "grw": ["simulate", "grw", "--trajectories", "5", "--t-end", "1", "--records", "10"],
    "csl-linear": ["simulate", "csl", "--trajectories", "4", "--t-end", "0.5", "--records", "5"],
    "csl-nonlinear": ["simulate", "csl", "--scheme", "nonlinear", "--trajectories", "3", "--t-end", "0.05",
                      "--dt", "0.001", "--lambda", "0.5", "--records", "5"],
    "csl-colored": ["simulate", "csl", "--noise", "colored", "--omega-c", "2", "--trajectories", "3",
                    "--t-end", "0.5", "--records", "5"],
    "heat": ["heat", "--duration", "1", "--duration", "31557600"],
    "bounds": ["bounds", "--variant", "white"],
    "bounds-colored": ["bounds", "--variant", "colored", "--omega-c", "100"],
    "bounds-dissipative": ["bounds", "--variant", "dissipative", "--t-csl", "1e-3"],
}


@pytest.fixture
def experiments(tmp_path):
    p = tmp_path / "experiments.json"
    p.write_text(json.dumps(EXPERIMENTS))
    return p


def run(tmp_path, experiments, name, tag, seed="7"):
    argv = list(RUNS[name])
    if argv[0] == "bounds":
        argv += ["--experiments", str(experiments)]
    elif argv[0] != "heat":
        argv += ["--seed", seed]
    out = tmp_path / f"{name}-{tag}.csv"
    assert main(argv + ["--out", str(out)]) == 0
    return out.read_bytes()


@pytest.mark.parametrize("name", sorted(RUNS))
def test_byte_identical_reruns(tmp_path, experiments, name):
    first = run(tmp_path, experiments, name, "a")
    second = run(tmp_path, experiments, name, "b")
    assert first and first == second


@pytest.mark.parametrize("name", ["noise-white", "grw", "csl-linear"])
def test_seed_changes_output(tmp_path, experiments, name):
    assert run(tmp_path, experiments, name, "a", seed="1") != run(tmp_path, experiments, name, "b", seed="2")


def test_noise_csv_shape(tmp_path, experiments):
    rows = list(csv.reader(run(tmp_path, experiments, "noise-white", "a").decode().splitlines()))
    assert rows[0] == ["step"] + [f"cell_{j}" for j in range(8)]
    data = np.array(rows[1:], dtype=float)
    assert data.shape == (50, 9)
    # white slices have variance 1 / (dx dt) = 400 with the defaults
    assert 200 < data[:, 1:].var() < 600


def test_noise_binary(tmp_path):
    out = tmp_path / "n.bin"
    assert main(["noise-gen", "--steps", "10", "--points", "16", "--format", "binary", "--out", str(out)]) == 0
    assert np.fromfile(out, "<f8").shape == (160,)


def test_heat_hydrogen_year(capsys):
    assert main(["heat", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    white = [r for r in doc["rows"] if r["model"] == "white"][0]
    assert 3e-14 <= white["delta_T_K"] <= 3e-13
    diss = [r for r in doc["rows"] if r["model"] == "dissipative"][0]
    assert diss["delta_T_K"] < white["delta_T_K"]


def test_bounds_report_json(tmp_path, experiments):
    report = tmp_path / "r.json"
    main(["bounds", "--experiments", str(experiments), "--rc-points", "7", "--out", str(tmp_path / "c.csv"),
          "--report", str(report)])
    doc = json.loads(report.read_text())
    assert doc["variant"] == "white"
    assert doc["verdicts"]["graphene macroscopicity"]["grw"] == "allowed"
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "r_c_m,lambda_per_s,sense,source"
    assert len(lines) == 1 + 3 * 7


def test_invalid_input_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('[{"name": "x", "kind": "interferometric", "n_nucleons": 5, "duration": 1, "observable_limit": 0.5}]')
    assert main(["bounds", "--experiments", str(bad)]) == 2
    assert "separation" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "collapsesim", "heat"], capture_output=True, text=True, check=True)
    assert "white" in out.stdout and "dissipative" in out.stdout
