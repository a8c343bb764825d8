import json
from pathlib import Path

import pytest

from eoqsim.cli import main

BASE = {
    "grid": {"n_rows": 2, "n_cols": 3},
    "seed": 3,
    "spam_pair": [[0, 1], [0, 2]],
    "exchange_model": {"j0_mhz": 1.0, "v_b0_v": 0.1, "eps0_v": 0.2},
    "noise": {"sigma_j_rel": 0.01, "sigma_bz_khz": 200, "b_uniform_mhz": 28},
}


def _write(tmp_path, extra, name="cfg.json"):
    cfg = {**BASE, **extra}
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _run(sub, cfg_path, out, *extra):
    return main([sub, "--config", cfg_path, "--out", str(out), *extra])


def test_missing_config_file_exit_2(tmp_path, capsys):
    assert main(["enumerate", "--config", str(tmp_path / "nope.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    path = _write(tmp_path, {"surprise": 1})
    assert _run("enumerate", path, tmp_path / "o") == 2
    assert "surprise" in capsys.readouterr().err


def test_invalid_json_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["enumerate", "--config", str(path)]) == 2


def test_missing_experiment_block_exit_2(tmp_path, capsys):
    path = _write(tmp_path, {})
    assert _run("rb", path, tmp_path / "o") == 2


def test_enumerate_counts(tmp_path):
    path = _write(tmp_path, {})
    out = tmp_path / "out"
    assert _run("enumerate", path, out) == 0
    doc = json.loads((out / "enumerate.json").read_text())
    assert len(doc["tqds"]) == 10
    assert len(doc["qubit_assignments"]) == 20
    assert doc["seed"] == 3 and doc["version"]


def test_place_dead_dot(tmp_path):
    cfg = {**BASE, "grid": {"n_rows": 2, "n_cols": 3, "dead_dots": [[0, 0]]}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert _run("place", str(path), out) == 0
    doc = json.loads((out / "placement.json").read_text())
    assert doc["n_qubits"] == 1


def test_route_output(tmp_path, capsys):
    path = _write(tmp_path, {"route": {"from_pair": [[0, 1], [0, 2]],
                                       "to_pair": [[0, 1], [1, 2]]}})
    out = tmp_path / "out"
    assert _run("route", path, out) == 0
    doc = json.loads((out / "route.json").read_text())
    assert [p["axis_label"] for p in doc["pulses"]] == ["Y7"]
    assert "Y7" in capsys.readouterr().out


def test_route_unreachable_exit_2(tmp_path):
    cfg = {**BASE, "grid": {"n_rows": 2, "n_cols": 3, "dead_dots": [[1, 0], [1, 1]]},
           "route": {"from_pair": [[0, 1], [0, 2]], "to_pair": [[0, 0], [1, 0]]}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert _run("route", str(path), tmp_path / "o") == 2


RB_BLOCK = {
    "rb": {
        "frame": {"tqd": [[0, 0], [0, 1], [0, 2]], "permutation": "(1,2)3"},
        "lengths": [2, 8, 32],
        "n_sequences": 3,
        "shots": 4,
    }
}


def test_rb_deterministic_outputs(tmp_path):
    path = _write(tmp_path, RB_BLOCK)
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run("rb", path, a) == 0
    assert _run("rb", path, b, "--threads", "3") == 0
    assert (a / "rb_raw.csv").read_bytes() == (b / "rb_raw.csv").read_bytes()
    assert (a / "rb_result.json").read_bytes() == (b / "rb_result.json").read_bytes()


def test_rb_seed_override_changes_results(tmp_path):
    path = _write(tmp_path, RB_BLOCK)
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run("rb", path, a) == 0
    assert _run("rb", path, b, "--seed", "99") == 0
    assert (a / "rb_raw.csv").read_bytes() != (b / "rb_raw.csv").read_bytes()
    assert json.loads((b / "rb_result.json").read_text())["config"]["seed"] == 99


def test_config_echo_round_trip(tmp_path):
    path = _write(tmp_path, RB_BLOCK)
    a = tmp_path / "a"
    assert _run("rb", path, a) == 0
    echoed = json.loads((a / "rb_result.json").read_text())["config"]
    path2 = tmp_path / "echo.json"
    path2.write_text(json.dumps(echoed))
    b = tmp_path / "b"
    assert _run("rb", str(path2), b) == 0
    assert (a / "rb_raw.csv").read_bytes() == (b / "rb_raw.csv").read_bytes()


def test_nosc_csv(tmp_path):
    path = _write(tmp_path, {"nosc": {"axes": [
        {"label": "X1", "j_mhz": 100, "sigma_j_rel": 0.05}], "n_samples": 200}})
    out = tmp_path / "out"
    assert _run("nosc", path, out) == 0
    lines = (out / "nosc.csv").read_text().splitlines()
    assert lines[0] == "axis,j_mhz,sigma_j_rel,n_osc,unbounded,gaussian_prediction"
    assert lines[1].startswith("X1,")


def test_fingerprint_files(tmp_path):
    path = _write(tmp_path, {"fingerprint": {
        "target_axis": "X2", "v1_v": {"start": -0.1, "stop": 0.1, "num": 3},
        "v2_v": {"start": -0.1, "stop": 0.1, "num": 3}, "t_evolve_ns": 20}})
    out = tmp_path / "out"
    assert _run("fingerprint", path, out) == 0
    assert (out / "fingerprint_X2.csv").exists()
    meta = json.loads((out / "fingerprint_X2.json").read_text())
    assert meta["axis"] == "X2"


def test_validate_packing_pass(tmp_path):
    path = _write(tmp_path, {"validate": {"packing": {
        "max_rows": 2, "max_cols": 3, "max_dead_dots": 1}}})
    out = tmp_path / "out"
    assert _run("validate", path, out) == 0
    doc = json.loads((out / "validate.json").read_text())
    assert doc["passed"] is True


def test_writes_only_in_out_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = _write(tmp_path, {})
    out = tmp_path / "only-here"
    assert _run("enumerate", path, out) == 0
    created = {p.name for p in tmp_path.iterdir()}
    assert created == {"cfg.json", "only-here"}
