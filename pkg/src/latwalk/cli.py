"""Command-line front end: config-driven simulation, optimization and export.

Verbs: simulate, optimize, thresholds, robustness, sample.  Each reads a JSON
experiment config (schema documented in the README), runs the corresponding
computation, and writes portable artifacts into the output directory:
correlation matrices as CSV with waveguide-index headers, a machine-readable
result document, optional portable-graymap heatmaps, and per-step CSV traces
for marginal evolutions and optimizer runs.  All files are written
atomically; timestamps only appear in the sidecar run.log so outputs are
byte-reproducible for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (CorrelationMatrix, correlation, nonclassicality, sample_counts,
                       schmidt_number, similarity)
from .errors import ConfigurationError, QuadratureError
from .inverse_design import (DesignProblem, OptimizeSettings, TargetState, objective,
                             optimize, robustness_sweep)
from .lattice import LatticeSpec
from .linear_walk import BiphotonState, InputSpec, propagate_linear, stabilization_threshold_linear
from .nonlinear_walk import (PumpProfile, SpdcSettings, marginal_evolution, momentum_grid,
                             spdc_state, spdc_state_momentum, stabilization_threshold_nonlinear)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_FLOAT_FMT = "%.17g"


class ConfigError(ValueError):
    """Config file failed validation; message carries the offending path."""


# ---------------------------------------------------------------------------
# config loading and validation


def _require_keys(block: dict, path: str, required: set, optional: set = frozenset()):
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(block) - required - set(optional)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")
    missing = required - set(block)
    if missing:
        raise ConfigError(f"{path}: missing required key(s) {sorted(missing)}")


def _positive_int(block, key, path, minimum=1):
    v = block[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise ConfigError(f"{path}.{key}: expected an integer >= {minimum}")
    return v


def _number(block, key, path):
    v = block[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{path}.{key}: expected a number")
    return float(v)


def load_config(path: str | Path) -> dict:
    """Parse and schema-validate an experiment config; unknown keys are fatal."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    validate_config(config)
    return config


_MODES = ("linear", "nonlinear", "momentum", "thresholds", "optimize", "robustness")
_THRESHOLD_CASES = ("linear_separable", "linear_plus", "linear_minus",
                    "spdc_single", "spdc_pair_in_phase", "spdc_pair_out_of_phase")


def _validate_lattice(block, path):
    _require_keys(block, path, {"n_waveguides", "length"}, {"coupling", "couplings"})
    _positive_int(block, "n_waveguides", path, minimum=2)
    _number(block, "length", path)
    if ("coupling" in block) == ("couplings" in block):
        raise ConfigError(f"{path}: give exactly one of 'coupling' or 'couplings'")
    if "coupling" in block:
        _number(block, "coupling", path)
    else:
        cs = block["couplings"]
        if not isinstance(cs, list) or not cs or not all(
                isinstance(c, (int, float)) and not isinstance(c, bool) for c in cs):
            raise ConfigError(f"{path}.couplings: expected a list of numbers")


def _validate_input(block, path):
    _require_keys(block, path, {"kind"}, {"waveguide"})
    if block["kind"] not in ("separable_same_waveguide", "path_entangled_plus",
                             "path_entangled_minus"):
        raise ConfigError(f"{path}.kind: unknown input kind {block['kind']!r}")
    if "waveguide" in block and not isinstance(block["waveguide"], int):
        raise ConfigError(f"{path}.waveguide: expected an integer")


def _validate_pump(block, path):
    _require_keys(block, path, set(), {"kind", "waveguide", "ratio", "phase", "amplitudes"})
    if "amplitudes" in block:
        if "kind" in block:
            raise ConfigError(f"{path}: give either 'kind' or explicit 'amplitudes'")
        amps = block["amplitudes"]
        if not isinstance(amps, dict) or not amps:
            raise ConfigError(f"{path}.amplitudes: expected a nonempty object")
        for key, val in amps.items():
            try:
                int(key)
            except ValueError:
                raise ConfigError(f"{path}.amplitudes: waveguide {key!r} is not an integer")
            if (not isinstance(val, list) or len(val) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in val)):
                raise ConfigError(f"{path}.amplitudes[{key}]: expected [re, im]")
        return
    if "kind" not in block:
        raise ConfigError(f"{path}: give either 'kind' or explicit 'amplitudes'")
    kind = block["kind"]
    if kind not in ("single", "pair_in_phase", "pair_out_of_phase", "symmetric_three"):
        raise ConfigError(f"{path}.kind: unknown pump kind {kind!r}")
    if kind == "symmetric_three":
        for key in ("ratio", "phase"):
            if key not in block:
                raise ConfigError(f"{path}: symmetric_three pumps need '{key}'")
            _number(block, key, path)
    elif "ratio" in block or "phase" in block:
        raise ConfigError(f"{path}: 'ratio'/'phase' only apply to symmetric_three pumps")


def _validate_spdc(block, path):
    _require_keys(block, path, set(),
                  {"gamma", "quadrature_points", "mode", "check_convergence", "delta_beta0"})
    if "gamma" in block:
        _number(block, "gamma", path)
    if "quadrature_points" in block:
        _positive_int(block, "quadrature_points", path, minimum=16)
    if "mode" in block and block["mode"] not in ("finite", "analytic_infinite"):
        raise ConfigError(f"{path}.mode: expected 'finite' or 'analytic_infinite'")
    if "check_convergence" in block and not isinstance(block["check_convergence"], bool):
        raise ConfigError(f"{path}.check_convergence: expected a boolean")
    if "delta_beta0" in block:
        _number(block, "delta_beta0", path)


def _validate_target(block, path):
    _require_keys(block, path, {"kind"}, {"n_waveguides"})
    if block["kind"] not in ("w_state", "anti_state"):
        raise ConfigError(f"{path}.kind: expected 'w_state' or 'anti_state'")
    if "n_waveguides" in block:
        _positive_int(block, "n_waveguides", path, minimum=3)


def validate_config(config: dict) -> None:
    if not isinstance(config, dict):
        raise ConfigError("config: expected a top-level object")
    mode = config.get("mode")
    if mode not in _MODES:
        raise ConfigError(f"config.mode: expected one of {list(_MODES)}, got {mode!r}")

    allowed = {"mode", "seed", "output"}
    required = set()
    if mode == "linear":
        required |= {"lattice", "input"}
        allowed |= {"propagation_mode", "target", "sample"}
    elif mode == "nonlinear":
        required |= {"lattice", "pump"}
        allowed |= {"spdc", "target", "marginals", "sample"}
    elif mode == "momentum":
        required |= {"lattice", "pump", "momentum"}
        allowed |= {"spdc"}
    elif mode == "thresholds":
        allowed |= {"thresholds"}
    elif mode == "optimize":
        required |= {"target"}
        allowed |= {"optimize"}
    elif mode == "robustness":
        required |= {"target", "robustness"}
    _require_keys(config, "config", required | {"mode"}, allowed - required)

    if "seed" in config:
        _positive_int(config, "seed", "config", minimum=0)
    if "lattice" in config:
        _validate_lattice(config["lattice"], "config.lattice")
    if "input" in config:
        _validate_input(config["input"], "config.input")
    if "propagation_mode" in config and config["propagation_mode"] not in ("finite", "analytic_infinite"):
        raise ConfigError("config.propagation_mode: expected 'finite' or 'analytic_infinite'")
    if "pump" in config:
        _validate_pump(config["pump"], "config.pump")
    if "spdc" in config:
        _validate_spdc(config["spdc"], "config.spdc")
    if "momentum" in config:
        _require_keys(config["momentum"], "config.momentum", {"k_grid"})
        _positive_int(config["momentum"], "k_grid", "config.momentum", minimum=2)
    if "target" in config:
        _validate_target(config["target"], "config.target")
    if "marginals" in config:
        _require_keys(config["marginals"], "config.marginals", {"z_steps"})
        _positive_int(config["marginals"], "z_steps", "config.marginals", minimum=2)
    if "sample" in config:
        _require_keys(config["sample"], "config.sample", {"total_counts"})
        _positive_int(config["sample"], "total_counts", "config.sample")
    if "thresholds" in config:
        _require_keys(config["thresholds"], "config.thresholds", set(), {"cases", "coupling"})
        cases = config["thresholds"].get("cases", list(_THRESHOLD_CASES))
        if not isinstance(cases, list) or not cases:
            raise ConfigError("config.thresholds.cases: expected a nonempty list")
        for c in cases:
            if c not in _THRESHOLD_CASES:
                raise ConfigError(f"config.thresholds.cases: unknown case {c!r}")
        if "coupling" in config["thresholds"]:
            _number(config["thresholds"], "coupling", "config.thresholds")
    if "optimize" in config:
        _require_keys(config["optimize"], "config.optimize", set(),
                      {"starts", "max_iters", "step_rule", "fd_epsilon", "seed",
                       "quadrature_points", "length"})
        block = config["optimize"]
        if "starts" in block:
            _positive_int(block, "starts", "config.optimize")
        if "max_iters" in block:
            _positive_int(block, "max_iters", "config.optimize", minimum=0)
        if "step_rule" in block and block["step_rule"] not in ("backtracking", "fixed"):
            raise ConfigError("config.optimize.step_rule: expected 'backtracking' or 'fixed'")
        if "fd_epsilon" in block:
            _number(block, "fd_epsilon", "config.optimize")
        if "seed" in block:
            _positive_int(block, "seed", "config.optimize", minimum=0)
        if "quadrature_points" in block:
            _positive_int(block, "quadrature_points", "config.optimize", minimum=16)
        if "length" in block:
            _number(block, "length", "config.optimize")
    if "robustness" in config:
        _require_keys(config["robustness"], "config.robustness",
                      {"perturbation", "trials", "couplings", "ratio", "phase"}, {"seed"})
        block = config["robustness"]
        _number(block, "perturbation", "config.robustness")
        _positive_int(block, "trials", "config.robustness")
        _number(block, "ratio", "config.robustness")
        _number(block, "phase", "config.robustness")
        if not isinstance(block["couplings"], list) or not all(
                isinstance(c, (int, float)) and not isinstance(c, bool)
                for c in block["couplings"]):
            raise ConfigError("config.robustness.couplings: expected a list of numbers")
        if "seed" in block:
            _positive_int(block, "seed", "config.robustness", minimum=0)
    if "output" in config:
        _require_keys(config["output"], "config.output", set(), {"heatmap", "format"})
        if "heatmap" in config["output"] and not isinstance(config["output"]["heatmap"], bool):
            raise ConfigError("config.output.heatmap: expected a boolean")
        if "format" in config["output"] and config["output"]["format"] not in ("csv", "json"):
            raise ConfigError("config.output.format: expected 'csv' or 'json'")


# ---------------------------------------------------------------------------
# builders


def _build_lattice(block) -> LatticeSpec:
    n = block["n_waveguides"]
    if "coupling" in block:
        return LatticeSpec.uniform(n, block["coupling"], block["length"])
    return LatticeSpec(n, tuple(block["couplings"]), block["length"])


def _build_input(block) -> InputSpec:
    return InputSpec(block["kind"], waveguide=block.get("waveguide", 0))


def _build_pump(block) -> PumpProfile:
    if "amplitudes" in block:
        return PumpProfile({int(k): complex(v[0], v[1]) for k, v in block["amplitudes"].items()})
    kind = block["kind"]
    n = block.get("waveguide", 0)
    if kind == "single":
        return PumpProfile.single(n)
    if kind == "pair_in_phase":
        return PumpProfile.pair_in_phase(n)
    if kind == "pair_out_of_phase":
        return PumpProfile.pair_out_of_phase(n)
    return PumpProfile.symmetric_three(block["ratio"], block["phase"], center=n)


def _build_spdc(block) -> SpdcSettings:
    block = block or {}
    return SpdcSettings(gamma=block.get("gamma", 1.0),
                        quadrature_points=block.get("quadrature_points", 64),
                        mode=block.get("mode", "finite"),
                        check_convergence=block.get("check_convergence", True),
                        delta_beta0=block.get("delta_beta0", 0.0))


def _build_target(block) -> TargetState:
    n = block.get("n_waveguides", 9)
    return TargetState(block["kind"], n)


# ---------------------------------------------------------------------------
# output writers (atomic: temp file + rename)


def _atomic_write(path: Path, data: str | bytes) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix_csv(path: Path, matrix: np.ndarray, labels: np.ndarray,
                     integer: bool = False) -> None:
    """Matrix CSV with a header row/column of waveguide labels."""
    lines = ["," + ",".join(str(l) for l in labels)]
    for label, row in zip(labels, matrix):
        if integer:
            cells = [str(int(v)) for v in row]
        else:
            cells = [_FLOAT_FMT % v for v in row]
        lines.append(f"{label}," + ",".join(cells))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_matrix_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Read back a matrix CSV written by this tool: (labels, matrix)."""
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    labels = np.array([int(x) for x in rows[0][1:]])
    matrix = np.array([[float(x) for x in row[1:]] for row in rows[1:]])
    row_labels = np.array([int(row[0]) for row in rows[1:]])
    if not np.array_equal(labels, row_labels):
        raise ValueError(f"{path}: row and column labels disagree")
    return labels, matrix


def write_heatmap_pgm(path: Path, matrix: np.ndarray) -> None:
    """8-bit portable graymap, rows top-to-bottom from +n to -n, linear scale."""
    peak = float(matrix.max())
    if peak <= 0.0:
        pixels = np.zeros_like(matrix, dtype=int)
    else:
        pixels = np.rint(255.0 * matrix / peak).astype(int)
    flipped = pixels[::-1, :]  # top row = largest signal label
    lines = ["P2", f"{matrix.shape[1]} {matrix.shape[0]}", "255"]
    lines += [" ".join(str(v) for v in row) for row in flipped]
    _atomic_write(path, "\n".join(lines) + "\n")


def write_trace_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_FLOAT_FMT % v if isinstance(v, float) else str(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_results(out_dir: Path, document: dict, fmt: str) -> Path:
    document = {"tool": "latwalk", "version": __version__, **document}
    if fmt == "json":
        path = out_dir / "results.json"
        _atomic_write(path, json.dumps(document, indent=2, sort_keys=True) + "\n")
    else:
        path = out_dir / "results.csv"
        lines = ["key,value"]
        for key, value in sorted(_flatten(document).items()):
            lines.append(f"{key},{value}")
        _atomic_write(path, "\n".join(lines) + "\n")
    return path


def _flatten(document: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in document.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif isinstance(value, (list, tuple)):
            flat[name] = ";".join(str(v) for v in value)
        else:
            flat[name] = value
    return flat


def _json_safe(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


# ---------------------------------------------------------------------------
# verb implementations


def _state_results(state: BiphotonState, config) -> tuple[dict, CorrelationMatrix]:
    normalized = state.normalize()
    corr = correlation(normalized)
    report = nonclassicality(corr)
    results = {
        "schmidt_number": schmidt_number(normalized),
        "i_b_total": report.i_b_total,
        "i_cs_total": report.i_cs_total,
        "state_norm_raw": state.norm,
    }
    if "target" in config:
        target = _build_target(config["target"])
        if target.n_waveguides == corr.labels.size:
            t = CorrelationMatrix(target.gamma_matrix(), corr.labels)
            results["similarity"] = similarity(corr, t)
        else:
            idx = [int(np.nonzero(corr.labels == l)[0][0])
                   for l in np.arange(target.n_waveguides) - (target.n_waveguides - 1) // 2]
            sub = CorrelationMatrix(corr.gamma_matrix[np.ix_(idx, idx)], corr.labels[idx])
            results["similarity"] = similarity(sub, CorrelationMatrix(
                target.gamma_matrix(), sub.labels))
    return results, corr


def _compute_state(config) -> BiphotonState:
    lattice = _build_lattice(config["lattice"])
    if config["mode"] == "linear":
        return propagate_linear(_build_input(config["input"]), lattice,
                                mode=config.get("propagation_mode", "finite"))
    return spdc_state(_build_pump(config["pump"]), lattice, _build_spdc(config.get("spdc")))


def _run_simulate(config, out_dir: Path, fmt: str, heatmap: bool, log) -> None:
    if config["mode"] == "momentum":
        lattice = _build_lattice(config["lattice"])
        psi_k = spdc_state_momentum(_build_pump(config["pump"]), lattice,
                                    _build_spdc(config.get("spdc")),
                                    config["momentum"]["k_grid"])
        k = momentum_grid(config["momentum"]["k_grid"])
        k_index = np.arange(k.size)
        write_matrix_csv(out_dir / "momentum_real.csv", psi_k.real, k_index)
        write_matrix_csv(out_dir / "momentum_imag.csv", psi_k.imag, k_index)
        document = {"mode": "momentum", "k_grid": int(k.size),
                    "k_values_start": float(k[0]), "k_values_step": float(k[1] - k[0]),
                    "parameters": config}
        _write_results(out_dir, document, fmt)
        if heatmap:
            write_heatmap_pgm(out_dir / "heatmap.pgm", np.abs(psi_k) ** 2)
        log(f"momentum matrix on a {k.size} x {k.size} grid")
        return

    state = _compute_state(config)
    results, corr = _state_results(state, config)
    write_matrix_csv(out_dir / "correlation.csv", corr.gamma_matrix, corr.labels)
    if heatmap:
        write_heatmap_pgm(out_dir / "heatmap.pgm", corr.gamma_matrix)
    if "marginals" in config:
        lattice = _build_lattice(config["lattice"])
        marg = marginal_evolution(_build_pump(config["pump"]), lattice,
                                  _build_spdc(config.get("spdc")),
                                  config["marginals"]["z_steps"])
        z = np.linspace(0.0, lattice.length, config["marginals"]["z_steps"])
        header = ["z"] + [str(l) for l in corr.labels]
        write_trace_csv(out_dir / "marginals.csv", header,
                        [[float(zv), *map(float, row)] for zv, row in zip(z, marg)])
    document = {"mode": config["mode"],
                "results": {k: _json_safe(v) for k, v in results.items()},
                "parameters": config}
    _write_results(out_dir, document, fmt)
    log(f"schmidt={results['schmidt_number']:.6f} "
        f"i_b={results['i_b_total']:.6g} i_cs={results['i_cs_total']:.6g}")


def _run_thresholds(config, out_dir: Path, fmt: str, log) -> None:
    block = config.get("thresholds", {})
    cases = block.get("cases", list(_THRESHOLD_CASES))
    coupling = block.get("coupling", 1.0)
    values = {}
    for case in cases:
        if case == "linear_separable":
            values[case] = stabilization_threshold_linear(
                InputSpec.separable_same_waveguide(0), coupling)
        elif case == "linear_plus":
            values[case] = stabilization_threshold_linear(
                InputSpec.path_entangled_plus(0), coupling)
        elif case == "linear_minus":
            values[case] = stabilization_threshold_linear(
                InputSpec.path_entangled_minus(0), coupling)
        elif case == "spdc_single":
            values[case] = stabilization_threshold_nonlinear(PumpProfile.single(0), coupling)
        elif case == "spdc_pair_in_phase":
            values[case] = stabilization_threshold_nonlinear(
                PumpProfile.pair_in_phase(0), coupling)
        else:
            values[case] = stabilization_threshold_nonlinear(
                PumpProfile.pair_out_of_phase(0), coupling)
    write_trace_csv(out_dir / "thresholds.csv", ["case", "walk_depth"],
                    [[case, float(v)] for case, v in values.items()])
    document = {"mode": "thresholds",
                "results": {k: float(v) for k, v in values.items()},
                "parameters": config}
    _write_results(out_dir, document, fmt)
    log(" ".join(f"{k}={v:.4f}" for k, v in values.items()))


def _design_problem(config) -> DesignProblem:
    target = _build_target(config["target"])
    block = config.get("optimize", {})
    return DesignProblem(target=target, n_waveguides=target.n_waveguides,
                         length=block.get("length", 1.0),
                         quadrature_points=block.get("quadrature_points", 64))


def _run_optimize(config, out_dir: Path, fmt: str, heatmap: bool, seed, threads, log) -> None:
    problem = _design_problem(config)
    block = config.get("optimize", {})
    settings = OptimizeSettings(
        starts=block.get("starts", 20),
        max_iters=block.get("max_iters", 150),
        step_rule=block.get("step_rule", "backtracking"),
        fd_epsilon=block.get("fd_epsilon", 1e-4),
        seed=seed if seed is not None else block.get("seed", 0),
        threads=threads,
    )
    result = optimize(problem, settings)
    write_trace_csv(out_dir / "trace.csv", ["step", "objective"],
                    [[i, float(v)] for i, v in enumerate(result.trace)])
    from .inverse_design import _forward
    state = _forward(problem, result.params, check=False).normalize()
    corr = correlation(state)
    write_matrix_csv(out_dir / "correlation.csv", corr.gamma_matrix, corr.labels)
    if heatmap:
        write_heatmap_pgm(out_dir / "heatmap.pgm", corr.gamma_matrix)
    document = {"mode": "optimize",
                "results": {
                    "couplings": [float(c) for c in result.couplings],
                    "ratio": result.ratio,
                    "phase": result.phase,
                    "similarity": result.similarity,
                    "schmidt_number": result.schmidt,
                    "best_fidelity": result.best_fidelity,
                    "starts": result.starts,
                    "converged": result.converged,
                },
                "parameters": config, "seed": settings.seed}
    _write_results(out_dir, document, fmt)
    log(f"similarity={result.similarity:.6f} schmidt={result.schmidt:.4f} "
        f"converged={result.converged}")


def _run_robustness(config, out_dir: Path, fmt: str, seed, log) -> None:
    target = _build_target(config["target"])
    problem = DesignProblem(target=target, n_waveguides=target.n_waveguides)
    block = config["robustness"]
    params = np.array([*block["couplings"], block["ratio"], block["phase"]])
    if params.size != problem.n_parameters:
        raise ConfigError(f"config.robustness.couplings: expected "
                          f"{problem.n_coupling_parameters} couplings")
    use_seed = seed if seed is not None else block.get("seed", 0)
    stats = robustness_sweep(problem, params, block["perturbation"],
                             block["trials"], use_seed)
    write_trace_csv(out_dir / "trials.csv", ["trial", "similarity", "fidelity"],
                    [[i, float(s), float(f)] for i, (s, f)
                     in enumerate(zip(stats.similarities, stats.fidelities))])
    document = {"mode": "robustness",
                "results": {
                    "min_similarity": stats.min_similarity,
                    "mean_similarity": stats.mean_similarity,
                    "min_fidelity": stats.min_fidelity,
                    "mean_fidelity": stats.mean_fidelity,
                    "trials": int(block["trials"]),
                    "baseline_similarity": objective(problem, params),
                },
                "parameters": config, "seed": use_seed}
    _write_results(out_dir, document, fmt)
    log(f"min_similarity={stats.min_similarity:.4f} mean={stats.mean_similarity:.4f}")


def _run_sample(config, out_dir: Path, fmt: str, seed, log) -> None:
    if "sample" not in config:
        raise ConfigError("config.sample: required for the 'sample' verb")
    state = _compute_state(config)
    corr = correlation(state.normalize())
    use_seed = seed if seed is not None else config.get("seed", 0)
    counts = sample_counts(corr, config["sample"]["total_counts"], use_seed)
    write_matrix_csv(out_dir / "counts.csv", counts, corr.labels, integer=True)
    document = {"mode": config["mode"],
                "results": {"total_counts": int(counts.sum()),
                            "occupied_cells": int(np.count_nonzero(counts))},
                "parameters": config, "seed": use_seed}
    _write_results(out_dir, document, fmt)
    log(f"sampled {counts.sum()} coincidences over {np.count_nonzero(counts)} cells")


# ---------------------------------------------------------------------------
# entry point


_VERB_MODES = {
    "simulate": ("linear", "nonlinear", "momentum"),
    "optimize": ("optimize",),
    "thresholds": ("thresholds",),
    "robustness": ("robustness",),
    "sample": ("linear", "nonlinear"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latwalk",
        description="Quantum walks of photon pairs in waveguide lattices")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, modes in _VERB_MODES.items():
        p = sub.add_parser(verb, help=f"run a config with mode in {list(modes)}")
        p.add_argument("--config", required=True, help="path to a JSON experiment config")
        p.add_argument("--out", default=".", help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for multi-start optimization")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="result document format (default json)")
        p.add_argument("--heatmap", action="store_true",
                       help="also write a portable graymap of the correlation matrix")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if config["mode"] not in _VERB_MODES[args.verb]:
        print(f"error: verb {args.verb!r} expects config mode in "
              f"{list(_VERB_MODES[args.verb])}, got {config['mode']!r}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = args.format or config.get("output", {}).get("format", "json")
    heatmap = args.heatmap or config.get("output", {}).get("heatmap", False)
    seed = args.seed if args.seed is not None else config.get("seed")

    log_lines = []

    def log(message: str) -> None:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        log_lines.append(f"{stamp} {message}")

    log(f"verb={args.verb} config={args.config}")
    try:
        if args.verb == "simulate":
            _run_simulate(config, out_dir, fmt, heatmap, log)
        elif args.verb == "thresholds":
            _run_thresholds(config, out_dir, fmt, log)
        elif args.verb == "optimize":
            _run_optimize(config, out_dir, fmt, heatmap, seed, max(1, args.threads), log)
        elif args.verb == "robustness":
            _run_robustness(config, out_dir, fmt, seed, log)
        else:
            _run_sample(config, out_dir, fmt, seed, log)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigurationError, ValueError) as exc:
        print(f"error: invalid experiment: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"error: {exc} (residual {exc.residual:.3e})", file=sys.stderr)
        return EXIT_NUMERICAL

    log("done")
    (out_dir / "run.log").write_text("\n".join(log_lines) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
