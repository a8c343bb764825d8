"""Batch experiment runner: JSON config in, JSON/CSV artifacts out.

Usage: eoqsim <subcommand> --config <path> [--out <dir>] [--seed <int>]
[--threads <k>]. Subcommands: enumerate, place, fingerprint, nosc, rb,
route, validate. All physical quantities in configs carry units in their
key names (t_pulse_ns, j0_mhz, sigma_bz_khz, ...); unknown keys are
rejected. Exit codes: 0 success, 2 config error, 3 fit non-convergence,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .encoding import RouteError, frame_for, route_singlet_to_pair
from .lattice import GridSpec, QubitAssignment, Tqd, enumerate_qubit_assignments, \
    enumerate_tqds, pack_qubits
from .pulses import (
    ExchangeModel,
    FitNotConvergedError,
    extract_n_osc,
    gaussian_nosc_prediction,
    simulate_decay_trace,
    simulate_fingerprint,
)
from .rb import RBConfig, RBNoise, fit_rb, run_rb, validate_rb_oracle

SUBCOMMANDS = ("enumerate", "place", "fingerprint", "nosc", "rb", "route", "validate")

_DOT = {"type": "array", "items": {"type": "integer", "minimum": 0},
        "minItems": 2, "maxItems": 2}
_PAIR = {"type": "array", "items": _DOT, "minItems": 2, "maxItems": 2}
_RANGE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["start", "stop", "num"],
    "properties": {
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "num": {"type": "integer", "minimum": 2},
    },
}
_FRAME = {
    "type": "object",
    "additionalProperties": False,
    "required": ["tqd", "permutation"],
    "properties": {
        "tqd": {"type": "array", "items": _DOT, "minItems": 3, "maxItems": 3},
        "permutation": {"enum": ["(1,2)3", "(2,3)1"]},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["grid"],
    "properties": {
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n_rows", "n_cols"],
            "properties": {
                "n_rows": {"type": "integer", "minimum": 1},
                "n_cols": {"type": "integer", "minimum": 1},
                "dead_dots": {"type": "array", "items": _DOT},
                "dead_axes": {"type": "array", "items": {"type": "string"}},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "out_dir": {"type": "string"},
        "spam_pair": _PAIR,
        "exchange_model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["j0_mhz", "v_b0_v", "eps0_v"],
            "properties": {
                "j0_mhz": {"type": "number", "exclusiveMinimum": 0},
                "v_b0_v": {"type": "number", "exclusiveMinimum": 0},
                "eps0_v": {"type": "number", "exclusiveMinimum": 0},
                "v_min_v": {"type": "number"},
                "v_max_v": {"type": "number"},
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sigma_j_rel": {"type": "number", "minimum": 0},
                "sigma_bz_khz": {"type": "number", "minimum": 0},
                "b_uniform_mhz": {"type": "number", "minimum": 0},
            },
        },
        "enumerate": {"type": "object", "additionalProperties": False, "properties": {}},
        "place": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "objective": {"enum": ["max-count", "max-count-then-adjacency"]},
                "solver": {"enum": ["exact", "brute-force-oracle"]},
            },
        },
        "fingerprint": {
            "type": "object",
            "additionalProperties": False,
            "required": ["target_axis", "v1_v", "v2_v", "t_evolve_ns"],
            "properties": {
                "target_axis": {"type": "string"},
                "v1_v": _RANGE,
                "v2_v": _RANGE,
                "t_evolve_ns": {"type": "number", "exclusiveMinimum": 0},
                "shots": {"type": ["integer", "null"], "minimum": 1},
            },
        },
        "nosc": {
            "type": "object",
            "additionalProperties": False,
            "required": ["axes", "n_samples"],
            "properties": {
                "axes": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["label", "j_mhz", "sigma_j_rel"],
                        "properties": {
                            "label": {"type": "string"},
                            "j_mhz": {"type": "number", "exclusiveMinimum": 0},
                            "sigma_j_rel": {"type": "number", "exclusiveMinimum": 0},
                        },
                    },
                },
                "n_samples": {"type": "integer", "minimum": 1},
            },
        },
        "rb": {
            "type": "object",
            "additionalProperties": False,
            "required": ["frame", "lengths"],
            "properties": {
                "frame": _FRAME,
                "lengths": {
                    "type": "array",
                    "minItems": 3,
                    "items": {"type": "integer", "minimum": 1},
                },
                "n_sequences": {"type": "integer", "minimum": 1},
                "shots": {"type": "integer", "minimum": 1},
                "mode": {"enum": ["probability", "sample"]},
                "t_pulse_ns": {"type": "number", "exclusiveMinimum": 0},
                "t_idle_ns": {"type": "number", "minimum": 0},
                "readout_error": {"type": "number", "minimum": 0, "maximum": 1},
                "injected_depolarizing": {
                    "type": ["number", "null"], "minimum": 0, "maximum": 1
                },
            },
        },
        "route": {
            "type": "object",
            "additionalProperties": False,
            "required": ["from_pair", "to_pair"],
            "properties": {"from_pair": _PAIR, "to_pair": _PAIR},
        },
        "validate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rb_oracle": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["p", "frame"],
                    "properties": {
                        "p": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.05},
                        "frame": _FRAME,
                        "lengths": {
                            "type": "array",
                            "minItems": 3,
                            "items": {"type": "integer", "minimum": 1},
                        },
                        "n_sequences": {"type": "integer", "minimum": 1},
                        "shots": {"type": "integer", "minimum": 1},
                    },
                },
                "packing": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "max_rows": {"type": "integer", "minimum": 1},
                        "max_cols": {"type": "integer", "minimum": 1},
                        "max_dead_dots": {"type": "integer", "minimum": 0},
                    },
                },
            },
        },
    },
}

DEFAULT_NOISE = {"sigma_j_rel": 0.01, "sigma_bz_khz": 200.0, "b_uniform_mhz": 28.0}


class ConfigError(ValueError):
    pass


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(k) for k in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    return cfg


def _grid_of(cfg: dict) -> GridSpec:
    g = cfg["grid"]
    try:
        return GridSpec(
            g["n_rows"],
            g["n_cols"],
            frozenset(tuple(d) for d in g.get("dead_dots", [])),
            frozenset(g.get("dead_axes", [])),
        )
    except ValueError as exc:
        raise ConfigError(f"bad grid: {exc}") from exc


def _noise_of(cfg: dict) -> RBNoise:
    n = {**DEFAULT_NOISE, **cfg.get("noise", {})}
    return RBNoise(
        sigma_j_rel=n["sigma_j_rel"],
        sigma_bz_hz=n["sigma_bz_khz"] * 1e3,
        b_uniform_hz=n["b_uniform_mhz"] * 1e6,
    )


def _spam_pair(cfg: dict):
    pair = cfg.get("spam_pair")
    if pair is None:
        raise ConfigError("this experiment requires spam_pair")
    return (tuple(pair[0]), tuple(pair[1]))


def _frame_of(grid: GridSpec, block: dict):
    try:
        tqd = Tqd(tuple(tuple(d) for d in block["tqd"]))
        return frame_for(grid, QubitAssignment(tqd, block["permutation"]))
    except ValueError as exc:
        raise ConfigError(f"bad frame: {exc}") from exc


def _write_json(out_dir: Path, name: str, payload: dict, cfg: dict, seed: int) -> Path:
    doc = {"version": __version__, "seed": seed, "config": cfg, **payload}
    path = out_dir / name
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _write_csv(out_dir: Path, name: str, header: list[str], rows) -> Path:
    path = out_dir / name
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
    return path


# -- subcommands -------------------------------------------------------------


def _run_enumerate(cfg, grid, out_dir, seed, threads):
    tqds = [
        {"dots": [list(d) for d in t.dots], "shape": t.shape} for t in enumerate_tqds(grid)
    ]
    assignments = [
        {
            "dots": [list(d) for d in a.tqd.dots],
            "permutation": a.permutation,
            "singlet_pair": [list(d) for d in a.singlet_pair],
            "gauge_dot": list(a.gauge_dot),
        }
        for a in enumerate_qubit_assignments(grid)
    ]
    _write_json(out_dir, "enumerate.json",
                {"tqds": tqds, "qubit_assignments": assignments}, cfg, seed)
    return 0


def _run_place(cfg, grid, out_dir, seed, threads):
    block = cfg.get("place", {})
    placement = pack_qubits(
        grid,
        objective=block.get("objective", "max-count-then-adjacency"),
        solver=block.get("solver", "exact"),
    )
    _write_json(
        out_dir,
        "placement.json",
        {
            "n_qubits": len(placement),
            "adjacency_count": placement.adjacency_count,
            "qubits": [
                {"dots": [list(d) for d in q.tqd.dots], "permutation": q.permutation}
                for q in placement.qubits
            ],
        },
        cfg,
        seed,
    )
    return 0


def _exchange_model(cfg: dict) -> ExchangeModel:
    m = cfg.get("exchange_model")
    if m is None:
        raise ConfigError("this experiment requires exchange_model")
    return ExchangeModel(
        j0_hz=m["j0_mhz"] * 1e6,
        v_b0=m["v_b0_v"],
        eps0=m["eps0_v"],
        v_min=m.get("v_min_v", -1.0),
        v_max=m.get("v_max_v", 1.0),
    )


def _run_fingerprint(cfg, grid, out_dir, seed, threads):
    block = cfg["fingerprint"]
    spam = _spam_pair(cfg)
    noise = _noise_of(cfg)
    model = _exchange_model(cfg)
    axis = grid.axis_by_label(block["target_axis"])
    route = route_singlet_to_pair(grid, spam, (axis.a, axis.b))
    v1 = np.linspace(block["v1_v"]["start"], block["v1_v"]["stop"], block["v1_v"]["num"])
    v2 = np.linspace(block["v2_v"]["start"], block["v2_v"]["stop"], block["v2_v"]["num"])
    fp = simulate_fingerprint(
        grid,
        spam,
        axis.label,
        route,
        model,
        v1,
        v2,
        block["t_evolve_ns"] * 1e-9,
        sigma_j_rel=noise.sigma_j_rel,
        sigma_bz_hz=noise.sigma_bz_hz,
        b_uniform_hz=noise.b_uniform_hz,
        shots=block.get("shots"),
        seed=seed,
    )
    rows = [
        (float(fp.v1[i]), float(fp.v2[j]), float(fp.p_singlet[i, j]))
        for i in range(len(fp.v1))
        for j in range(len(fp.v2))
    ]
    _write_csv(out_dir, f"fingerprint_{axis.label}.csv", ["v1_v", "v2_v", "p_singlet"], rows)
    _write_json(
        out_dir,
        f"fingerprint_{axis.label}.json",
        {
            "axis": axis.label,
            "route": [p.axis_label for p in route],
            "exchange_model": cfg["exchange_model"],
        },
        cfg,
        seed,
    )
    return 0


def _run_nosc(cfg, grid, out_dir, seed, threads):
    block = cfg["nosc"]
    rows = []
    for idx, spec in enumerate(block["axes"]):
        grid.axis_by_label(spec["label"])  # existence check
        j_hz = spec["j_mhz"] * 1e6
        pred = gaussian_nosc_prediction(spec["sigma_j_rel"])
        n_per = max(int(2.5 * pred), 8)
        times = np.linspace(0.0, n_per / j_hz, n_per * 12)[1:]
        trace = simulate_decay_trace(
            j_hz,
            times,
            sigma_j_rel=spec["sigma_j_rel"],
            n_samples=block["n_samples"],
            seed=seed + idx,
        )
        est = extract_n_osc(times, trace)
        rows.append(
            (
                spec["label"],
                float(spec["j_mhz"]),
                float(spec["sigma_j_rel"]),
                float(est.n_osc),
                int(est.unbounded),
                float(pred),
            )
        )
    _write_csv(
        out_dir,
        "nosc.csv",
        ["axis", "j_mhz", "sigma_j_rel", "n_osc", "unbounded", "gaussian_prediction"],
        rows,
    )
    _write_json(out_dir, "nosc.json",
                {"n_samples": block["n_samples"], "n_axes": len(rows)}, cfg, seed)
    return 0


def _run_rb_cmd(cfg, grid, out_dir, seed, threads):
    block = cfg["rb"]
    frame = _frame_of(grid, block["frame"])
    rb_cfg = RBConfig(
        grid=grid,
        frame=frame,
        spam_pair=_spam_pair(cfg),
        lengths=tuple(block["lengths"]),
        n_sequences=block.get("n_sequences", 20),
        shots=block.get("shots", 40),
        mode=block.get("mode", "probability"),
        t_pulse_s=block.get("t_pulse_ns", 5.0) * 1e-9,
        t_idle_s=block.get("t_idle_ns", 10.0) * 1e-9,
        noise=_noise_of(cfg),
        readout_error=block.get("readout_error", 0.0),
        injected_depolarizing=block.get("injected_depolarizing"),
        seed=seed,
        threads=threads,
    )
    data = run_rb(rb_cfg)
    rows = []
    for li, length in enumerate(data.lengths):
        for si in range(rb_cfg.n_sequences):
            leak = float(data.leakage[li, si]) if data.leakage is not None else ""
            rows.append((int(length), si, float(data.survival[li, si]), leak))
    _write_csv(out_dir, "rb_raw.csv", ["length", "sequence_id", "survival", "leakage"], rows)
    result = fit_rb(data)
    _write_json(
        out_dir,
        "rb_result.json",
        {
            "epsilon": result.epsilon,
            "epsilon_se": result.epsilon_se,
            "gamma": result.gamma,
            "gamma_se": result.gamma_se,
            "gamma_convention": "per-Clifford initial slope C*(1-beta)",
            "survival_params": result.survival_params,
            "leakage_params": result.leakage_params,
            "reduced_chi2": result.reduced_chi2,
            "degenerate": result.degenerate,
        },
        cfg,
        seed,
    )
    return 0


def _run_route(cfg, grid, out_dir, seed, threads):
    block = cfg["route"]
    seq = route_singlet_to_pair(
        grid,
        (tuple(block["from_pair"][0]), tuple(block["from_pair"][1])),
        (tuple(block["to_pair"][0]), tuple(block["to_pair"][1])),
    )
    payload = {
        "from_pair": block["from_pair"],
        "to_pair": block["to_pair"],
        "pulses": [{"axis_label": p.axis_label, "theta_rad": p.theta} for p in seq],
    }
    _write_json(out_dir, "route.json", payload, cfg, seed)
    print(" ".join(p.axis_label for p in seq) or "(empty)")
    return 0


def _run_validate(cfg, grid, out_dir, seed, threads):
    block = cfg.get("validate", {})
    checks = []
    ok = True
    if "rb_oracle" in block:
        ob = block["rb_oracle"]
        rep = validate_rb_oracle(
            grid,
            _frame_of(grid, ob["frame"]),
            _spam_pair(cfg),
            ob["p"],
            lengths=tuple(ob.get("lengths", (2, 4, 8, 16, 32, 64, 128, 256))),
            n_sequences=ob.get("n_sequences", 20),
            shots=ob.get("shots", 40),
            seed=seed,
            threads=threads,
        )
        ok &= rep.passed
        checks.append(
            {
                "check": "rb_oracle",
                "passed": rep.passed,
                "injected_p": rep.injected_p,
                "expected_epsilon": rep.expected_epsilon,
                "fitted_epsilon": rep.fitted_epsilon,
                "fitted_se": rep.fitted_se,
                "n_sigma": rep.n_sigma,
            }
        )
    if "packing" in block:
        pb = block["packing"]
        import itertools

        mismatches = 0
        n_patterns = 0
        for nr in range(2, pb.get("max_rows", 3) + 1):
            for nc in range(2, pb.get("max_cols", 3) + 1):
                dots = [(r, c) for r in range(nr) for c in range(nc)]
                for k in range(pb.get("max_dead_dots", 1) + 1):
                    for dead in itertools.combinations(dots, k):
                        g = GridSpec(nr, nc, frozenset(dead))
                        a = pack_qubits(g, solver="exact")
                        b = pack_qubits(g, solver="brute-force-oracle")
                        n_patterns += 1
                        if len(a) != len(b):
                            mismatches += 1
        ok &= mismatches == 0
        checks.append(
            {
                "check": "packing",
                "passed": mismatches == 0,
                "patterns": n_patterns,
                "mismatches": mismatches,
            }
        )
    _write_json(out_dir, "validate.json", {"passed": bool(ok), "checks": checks}, cfg, seed)
    return 0 if ok else 4


_RUNNERS = {
    "enumerate": _run_enumerate,
    "place": _run_place,
    "fingerprint": _run_fingerprint,
    "nosc": _run_nosc,
    "rb": _run_rb_cmd,
    "route": _run_route,
    "validate": _run_validate,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eoqsim",
        description="Exchange-only spin-qubit experiment runner",
    )
    parser.add_argument("experiment", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        name = args.experiment
        if name not in ("enumerate", "place", "validate") and name not in cfg:
            raise ConfigError(f"config has no '{name}' block")
        grid = _grid_of(cfg)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        cfg["seed"] = seed  # effective config echoed into outputs
        out_dir = Path(args.out if args.out is not None else cfg.get("out_dir", "eoqsim-out"))
        out_dir.mkdir(parents=True, exist_ok=True)
        return _RUNNERS[name](cfg, grid, out_dir, seed, max(args.threads, 1))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RouteError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FitNotConvergedError as exc:
        print(f"error: fit did not converge: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
