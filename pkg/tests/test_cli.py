import json
import subprocess
import sys

import numpy as np
import pytest

from psfilters import pqd
from psfilters.cli import main


def test_certify_exit_codes():
    assert main(["certify", "--filter", "gaussian:r=1", "--sets", "40"]) == 0
    assert main(["certify", "--filter", "klauder:L=1", "--sets", "40"]) == 2
    assert main(["certify", "--filter", "narcowich-ce", "--sets", "120"]) == 3


def test_validation_error_exits_one(capsys):
    assert main(["certify", "--filter", "gaussian:r=0"]) == 1
    err = capsys.readouterr().err
    assert "error:" in err and "delta" in err.lower()


def test_bad_spec_exits_one(capsys):
    assert main(["bounds", "--state", "vacuum", "--filter", "boxcar:w=1"]) == 1
    assert "error:" in capsys.readouterr().err


def test_bounds_json_shape(capsys):
    assert main(["bounds", "--state", "vacuum", "--filter", "gaussian:r=1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"config", "result"}
    assert doc["config"]["command"] == "bounds"
    assert doc["config"]["tool_version"]
    assert doc["config"]["tolerances"]
    assert abs(doc["result"]["certificate"]["f_e"] - 2.0 / 3.0) < 1e-9
    assert doc["result"]["fidelity_slack"] > -1e-6


def test_regularize_csv_roundtrip(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    argv = ["regularize", "--state", "coherent:re=0.8", "--filter", "gaussian:r=1",
            "--grid-extent", "5", "--grid-points", "41"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text()
    assert text.splitlines()[0] == "# psfilters-pqd-grid-v1"
    grid = pqd.PQDGrid.from_csv(str(out1))
    assert grid.s == 1.0 and grid.n_points == 41
    assert grid.meta["config_command"] == "regularize"
    assert "config_tool_version" in grid.meta
    assert abs(grid.riemann_sum() - 1.0) < 1e-4


def test_regularize_json_format(capsys):
    assert main(["regularize", "--state", "vacuum", "--filter", "gaussian:r=1",
                 "--grid-extent", "5", "--grid-points", "21",
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["n_points"] == 21
    vals = np.array(doc["result"]["values"])
    assert vals.shape == (21, 21)


def test_solve_width_cli(capsys):
    assert main(["solve-width", "--state", "vacuum", "--family", "gaussian",
                 "--epsilon", "0.25"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["result"]["width"] - 1.5) < 1e-5
    assert doc["result"]["certificate"]["f_e"] >= 0.75


def test_channel_out_cli(capsys):
    assert main(["channel-out", "--state", "thermal:nbar=0.3",
                 "--filter", "gaussian:r=1", "--eta", "0.8",
                 "--grid-extent", "5", "--grid-points", "61", "--dim", "25"]) == 0
    doc = json.loads(capsys.readouterr().out)
    est = doc["result"]["estimate"]
    assert est["channel"] == {"kind": "loss", "eta": 0.8}
    assert abs(est["trace"] - 1.0) < 1e-3
    assert doc["result"]["bound"]["trace_distance_bound"] > 0


def test_heterodyne_seeded_reproducible(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    argv = ["heterodyne-est", "--state", "coherent:re=1", "--filter", "gaussian:r=1",
            "--samples", "2000", "--seed", "5", "--povm", "fock:nmax=3"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = json.loads(out1.read_text())
    assert doc["config"]["seed"] == 5
    assert len(doc["result"]["estimates"]) == 4


def test_heterodyne_generates_and_records_seed(capsys):
    assert main(["heterodyne-est", "--state", "vacuum", "--filter", "gaussian:r=1",
                 "--samples", "1000", "--povm", "fock:nmax=2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["seed"] is not None
    assert doc["result"]["seed"] == doc["config"]["seed"]


def test_module_entry_point_subprocess():
    proc = subprocess.run([sys.executable, "-m", "psfilters.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "psfilters" in proc.stdout


def test_subprocess_not_cp_exit_code():
    proc = subprocess.run([sys.executable, "-m", "psfilters.cli", "certify",
                           "--filter", "klauder:L=1", "--sets", "30"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    doc = json.loads(proc.stdout)
    assert doc["result"]["verdict"] == "not-cp"
    assert doc["result"]["certify"]["witness"]["min_eigenvalue"] < 0
