import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from noq import cli
from noq import states as st
from noq.io import state_to_json

FAST_FLAGS = ["--restarts", "2", "--grid", "32"]


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(tmp_path, obj, name="x.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_family_then_compute_round_trip(tmp_path, capsys):
    code, out, _ = _run(["family", "werner", "d=2", "beta=-1"], capsys)
    assert code == 0
    path = _write(tmp_path, out)
    code, out, _ = _run(["compute", path, "--measure", "noq-a", *FAST_FLAGS], capsys)
    rep = json.loads(out)
    assert code == 0 and abs(rep["value"] - 0.5) < 1e-4
    assert rep["measure"] == "noq-a" and len(rep["basis_a"]["re"]) == 2


def test_compute_negativity_csv(tmp_path, capsys):
    path = _write(tmp_path, state_to_json(st.bell_state()))
    code, out, _ = _run(["compute", path, "--measure", "negativity", "--out", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert abs(float(rows[1][rows[0].index("value")]) - 0.5) < 1e-12


def test_malformed_json_exits_1(tmp_path, capsys):
    path = _write(tmp_path, "{not json")
    assert _run(["compute", path], capsys)[0] == 1
    assert _run(["compute", str(tmp_path / "missing.json")], capsys)[0] == 1


@pytest.mark.parametrize("obj", [
    {"dim_a": 2, "dim_b": 2, "re": (np.eye(4) / 3).tolist(), "im": np.zeros((4, 4)).tolist()},
    {"dim_a": 2, "dim_b": 3, "re": (np.eye(4) / 4).tolist(), "im": np.zeros((4, 4)).tolist()},
    {"re": (np.eye(4) / 4).tolist()},
    {"dim_a": 2, "dim_b": 2, "re": "x"},
])
def test_invalid_state_exits_2(tmp_path, capsys, obj):
    code, _, err = _run(["compute", _write(tmp_path, obj)], capsys)
    assert code == 2 and err.startswith("error")


def test_bad_family_parameters_exit_2(capsys):
    assert _run(["family", "werner", "d=2", "beta=3"], capsys)[0] == 2
    assert _run(["family", "werner", "d=2"], capsys)[0] == 2
    assert _run(["family", "werner", "d=2", "beta=0", "extra=1"], capsys)[0] == 2
    assert _run(["family", "random", "d_a=2", "d_b=2", "kind=nope"], capsys)[0] == 2


@pytest.mark.parametrize("args", [
    ["isotropic", "d=3", "lambda=0.5"],
    ["bell-diagonal", "p0=0.4", "p1=0.3", "p2=0.2", "p3=0.1"],
    ["bell-diagonal", "r11=0.5", "r22=-0.2", "r33=0.1"],
    ["channel", "kind=amplitude-damping", "gamma=0.3"],
    ["channel", "kind=pauli", "p0=0.7", "p1=0.1", "p2=0.1", "p3=0.1"],
    ["channel", "kind=random", "seed=3"],
    ["random", "d_a=2", "d_b=3", "seed=1", "kind=mcs"],
    ["random", "d_a=3", "d_b=2", "kind=separable"],
])
def test_families_produce_valid_states(capsys, args):
    code, out, _ = _run(["family", *args], capsys)
    obj = json.loads(out)
    assert code == 0
    rho = np.asarray(obj["re"]) + 1j * np.asarray(obj["im"])
    assert abs(np.trace(rho) - 1) < 1e-12


def test_sweep_amplitude_damping(tmp_path, capsys):
    spec = {"family": "channel", "params": {"kind": "amplitude-damping",
                                            "gamma": {"start": 0, "stop": 1, "step": 0.25}},
            "measures": ["noq-mixed-marginal", "noq-a"], "optimizer": {"restarts": 2, "grid": 32}}
    code, out, _ = _run(["sweep", _write(tmp_path, spec)], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["gamma", "noq-mixed-marginal", "noq-a"]
    assert len(rows) == 6
    for g, closed, numeric in rows[1:]:
        expected = np.sqrt(1 - float(g)) / 2
        assert abs(float(closed) - expected) < 1e-10 and abs(float(numeric) - expected) < 1e-4


def test_sweep_json_and_validation(tmp_path, capsys):
    spec = {"family": "werner", "params": {"d": 3, "beta": {"start": -1, "stop": 0, "step": 0.5}},
            "measures": ["negativity"]}
    code, out, _ = _run(["sweep", _write(tmp_path, spec), "--out", "json"], capsys)
    rows = json.loads(out)
    assert code == 0 and [r["beta"] for r in rows] == [-1.0, -0.5, 0.0]
    bad = dict(spec, measures=["nope"])
    assert _run(["sweep", _write(tmp_path, bad, "b.json")], capsys)[0] == 2
    assert _run(["sweep", _write(tmp_path, {"family": "werner"}, "c.json")], capsys)[0] == 2


def test_verify_passes_on_valid_state(tmp_path, capsys):
    path = _write(tmp_path, state_to_json(st.random_density(2, 2, seed=4)))
    code, out, _ = _run(["verify", path, *FAST_FLAGS], capsys)
    checks = json.loads(out)
    assert code == 0 and all(c["passed"] for c in checks)


def test_verify_failure_exit_code(tmp_path, capsys, monkeypatch):
    path = _write(tmp_path, state_to_json(st.bell_state()))
    monkeypatch.setattr(cli, "verify_state", lambda rho, cfg: [("forced", False, {})])
    code, _, err = _run(["verify", path], capsys)
    assert code == 3 and "forced" in err


def test_env_caps_evaluations(monkeypatch):
    monkeypatch.setenv("NOQ_MAX_EVALS", "123")
    args = cli.build_parser().parse_args(["compute", "x.json", "--max-evals", "1000"])
    assert cli._config(args).max_evaluations == 123


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "noq", "family", "werner", "d=2", "beta=0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["dim_a"] == 2


def test_sweep_werner_negativity_and_noq(tmp_path, capsys):
    spec = {"family": "werner", "params": {"d": 2, "beta": {"start": -1, "stop": 1, "step": 0.1}},
            "measures": ["negativity", "noq-a"], "optimizer": {"restarts": 2, "grid": 32}}
    code, out, _ = _run(["sweep", _write(tmp_path, spec)], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["beta", "negativity", "noq-a"] and len(rows) == 22
    for b, neg, q in rows[1:]:
        b = float(b)
        assert abs(float(q) - abs(b) / (2 * (2 + b))) < 1e-4
        assert float(neg) <= float(q) + 1e-6


def test_sweep_amplitude_damping_hierarchy(tmp_path, capsys):
    spec = {"family": "channel", "params": {"kind": "amplitude-damping",
                                            "gamma": {"start": 0, "stop": 1, "step": 0.05}},
            "measures": ["negativity", "noq-a"], "optimizer": {"restarts": 2, "grid": 32}}
    code, out, _ = _run(["sweep", _write(tmp_path, spec)], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 22
    for g, neg, q in rows[1:]:
        assert abs(float(q) - np.sqrt(1 - float(g)) / 2) < 1e-4
        assert float(neg) <= float(q) + 1e-6
