"""
Command-line entry point.

    gkbch COMMAND [--config PATH] [--output DIR] [--format json,csv] [--jobs N] [overrides]

Commands: simulate, experiment-nonuniform, experiment-approx,
experiment-travelwave, validate-peakon, validate-invariants.

A config file is a flat YAML or JSON mapping whose keys are listed in
``SCHEMA``; command-line flags override file values. Every value the run
uses is echoed into ``manifest.txt`` in the output directory. Exit status is 0
only if every check of the selected command passed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy
import yaml

from . import __version__
from .dynamics import STATUS_COMPLETED, EquationParams, SolverConfig, solve, trace_to_json_text
from .experiments import (
    CSV_SCHEMA_VERSION,
    DEFAULT_BOX,
    Sweep,
    report_to_json_text,
    run_approx_experiment,
    run_nonuniform_experiment,
)
from .initdata import HIGH_K, LOW_K, BumpSpec, DataRegime, build_bump, make_pair, make_peakon
from .spectral import Grid
from .travelwave import divergence_check, half_period, half_period_quadrature, delta_for_period, solve_wave_ode, traveling_pair
from .validation import invariants_report, peakon_series, smooth_datum

log = logging.getLogger("gkbch")

COMMANDS = (
    "simulate",
    "experiment-nonuniform",
    "experiment-approx",
    "experiment-travelwave",
    "validate-peakon",
    "validate-invariants",
)
FORMATS = ("json", "csv")
INITIAL_DATA = ("gaussian", "bump", "peakon", "pair")

# key -> (type, description)
SCHEMA = {
    "command": (str, "one of " + ", ".join(COMMANDS)),
    "k": (int, "nonlinearity exponent, >= 1"),
    "b": (float, "coefficient b"),
    "N": (int, "grid points (even, >= 16); experiments pick N per n when absent"),
    "L": (float, "box half-length"),
    "t_final": (float, "final time of a single run"),
    "dt_initial": (float, "upper bound on the time step"),
    "cfl_number": (float, "CFL number in (0, 1]"),
    "breaking_threshold": (float, "sup|u_x| that declares wave breaking"),
    "conservation_check_interval": (int, "steps between diagnostic records"),
    "regime": (str, "high_k or low_k"),
    "n_min": (int, "smallest n of a sweep"),
    "n_max": (int, "largest n of a sweep"),
    "lambda": (float, "carrier factor of the low_k data"),
    "t_max": (float, "largest observation time of an experiment"),
    "delta": (list, "wave amplitudes for experiment-travelwave"),
    "div_n": (list, "n values of the divergence check"),
    "c": (float, "peakon speed"),
    "mollify_cells": (float, "mollifier width in grid cells"),
    "initial": (str, "initial datum for simulate: " + ", ".join(INITIAL_DATA)),
    "amplitude": (float, "amplitude of the gaussian datum"),
    "n": (int, "index n of the pair datum for simulate"),
    "seed": (int, "seed of the random fields in validate-invariants"),
    "output_dir": (str, "output directory"),
    "formats": (list, "subset of json, csv"),
    "jobs": (int, "worker processes"),
}

BASE_DEFAULTS = {
    "dt_initial": 1.0,
    "cfl_number": 1.0,
    "breaking_threshold": 1e3,
    "conservation_check_interval": 1,
    "output_dir": "gkbch-out",
    "formats": ["json", "csv"],
    "jobs": 1,
    "seed": 0,
}

COMMAND_DEFAULTS = {
    "simulate": {"k": 1, "b": 2.0, "N": 1024, "L": 50.0, "t_final": 1.0, "cfl_number": 0.5,
                 "initial": "gaussian", "amplitude": 0.5, "n": 5, "lambda": 32.0},
    "experiment-nonuniform": {"k": 3, "n_min": 5, "t_max": 0.1, "lambda": 32.0,
                              "conservation_check_interval": 1000},
    "experiment-approx": {"k": 3, "n_min": 5, "n_max": 9, "t_max": 0.1, "L": 50.0},
    "experiment-travelwave": {"n_min": 4, "n_max": 12, "delta": [0.01, 0.05, 0.1, 0.19],
                              "div_n": [6, 8, 10], "t_max": 1.0, "N": 1024},
    "validate-peakon": {"k": 2, "b": 3.0, "c": 1.0, "N": 4096, "L": 40.0, "t_final": 1.0,
                        "mollify_cells": 4.0, "cfl_number": 0.5},
    "validate-invariants": {"N": 2048},
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class RunConfig:
    command: str
    values: dict
    defaulted: list = field(default_factory=list)

    @property
    def output_dir(self) -> Path:
        return Path(self.values["output_dir"])

    @property
    def formats(self) -> tuple:
        return tuple(self.values["formats"])

    @property
    def equation(self) -> EquationParams | None:
        if "k" in self.values and "b" in self.values:
            return EquationParams(self.values["k"], self.values["b"])
        return None

    @property
    def solver(self) -> SolverConfig:
        v = self.values
        return SolverConfig(
            dt_initial=v["dt_initial"],
            cfl_number=v["cfl_number"],
            t_final=v.get("t_final", v.get("t_max", 1.0)),
            breaking_threshold=v["breaking_threshold"],
            conservation_check_interval=v["conservation_check_interval"],
        )

    @property
    def grid(self) -> Grid | None:
        if "N" in self.values and "L" in self.values:
            return Grid(self.values["L"], self.values["N"])
        return None


def _coerce(key: str, value):
    typ = SCHEMA[key][0]
    try:
        if typ is int:
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if typ is float:
            return float(value)
        if typ is list:
            if isinstance(value, str):
                value = [s.strip() for s in value.split(",") if s.strip()]
            if not isinstance(value, (list, tuple)):
                value = [value]
            return list(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {value!r} as {typ.__name__}") from None


def parse_config(source: str | dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a validated RunConfig from config text (YAML or JSON) and flag overrides.

    Raises:
        ConfigError: on unknown keys or invalid values; the message names the key.
    """
    raw = {}
    if isinstance(source, dict):
        raw = dict(source)
    elif source:
        loaded = yaml.safe_load(source)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a mapping of keys to values")
        raw = loaded
    for key, val in (overrides or {}).items():
        if val is not None:
            raw[key] = val
    unknown = sorted(set(raw) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(map(str, unknown))}")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {command!r}")
    values = {key: _coerce(key, val) for key, val in raw.items()}
    defaults = dict(BASE_DEFAULTS)
    defaults.update(COMMAND_DEFAULTS[command])
    defaulted = []
    for key, val in defaults.items():
        if key not in values:
            values[key] = val
            defaulted.append(key)
            log.info("config: %s defaulted to %r", key, val)
    _derive(values, defaulted)
    _validate(values)
    return RunConfig(command, values, defaulted)


def _derive(v: dict, defaulted: list) -> None:
    cmd = v["command"]
    if cmd == "experiment-nonuniform":
        if "regime" not in v:
            v["regime"] = HIGH_K if v["k"] >= 3 else LOW_K
            defaulted.append("regime")
        if "n_max" not in v:
            v["n_max"] = 9 if v["regime"] == HIGH_K else 8
            defaulted.append("n_max")
        if "L" not in v:
            v["L"] = DEFAULT_BOX.get(v["regime"], 50.0)
            defaulted.append("L")
        for key in ("regime", "n_max", "L"):
            if key in defaulted:
                log.info("config: %s defaulted to %r", key, v[key])
    if cmd in ("experiment-nonuniform", "experiment-approx") and "b" not in v:
        v["b"] = float(v["k"] + 1)
        defaulted.append("b")
        log.info("config: b defaulted to %r", v["b"])


def _validate(v: dict) -> None:
    if "k" in v and v["k"] < 1:
        raise ConfigError(f"k: must be a positive integer, got {v['k']}")
    if "b" in v and not math.isfinite(v["b"]):
        raise ConfigError(f"b: must be finite, got {v['b']}")
    if "N" in v and (v["N"] % 2 or v["N"] < 16):
        raise ConfigError(f"N: must be an even integer >= 16, got {v['N']}")
    if "L" in v and not (math.isfinite(v["L"]) and v["L"] > 0):
        raise ConfigError(f"L: must be positive, got {v['L']}")
    for key in ("t_final", "t_max", "dt_initial", "breaking_threshold", "c", "amplitude"):
        if key in v and not (math.isfinite(v[key]) and v[key] > 0):
            raise ConfigError(f"{key}: must be positive, got {v[key]}")
    if not (0 < v["cfl_number"] <= 1):
        raise ConfigError(f"cfl_number: must lie in (0, 1], got {v['cfl_number']}")
    if v["conservation_check_interval"] < 1:
        raise ConfigError("conservation_check_interval: must be >= 1")
    if v["jobs"] < 1:
        raise ConfigError(f"jobs: must be >= 1, got {v['jobs']}")
    bad = [f for f in v["formats"] if f not in FORMATS]
    if bad or not v["formats"]:
        raise ConfigError(f"formats: expected a non-empty subset of {FORMATS}, got {v['formats']}")
    if "mollify_cells" in v and v["mollify_cells"] < 0:
        raise ConfigError("mollify_cells: must be nonnegative")
    if "initial" in v and v["initial"] not in INITIAL_DATA:
        raise ConfigError(f"initial: expected one of {INITIAL_DATA}, got {v['initial']!r}")
    if "regime" in v:
        if v["regime"] not in (HIGH_K, LOW_K):
            raise ConfigError(f"regime: expected high_k or low_k, got {v['regime']!r}")
        if v["regime"] == HIGH_K and v.get("k", 3) < 3:
            raise ConfigError(f"regime: high_k data require k >= 3, got k={v['k']}")
        if v["regime"] == LOW_K and v.get("k", 1) not in (1, 2):
            raise ConfigError(f"regime: low_k data require k in {{1, 2}}, got k={v['k']}")
    if "n_min" in v and "n_max" in v and not (1 <= v["n_min"] <= v["n_max"]):
        raise ConfigError(f"n_min/n_max: need 1 <= n_min <= n_max, got {v['n_min']}..{v['n_max']}")
    if v["command"] == "experiment-approx" and v["k"] < 3:
        raise ConfigError(f"k: experiment-approx uses the high_k data, needs k >= 3, got {v['k']}")
    if "delta" in v:
        try:
            v["delta"] = [float(d) for d in v["delta"]]
        except ValueError:
            raise ConfigError(f"delta: expected numbers, got {v['delta']}") from None
        if any(not (0 < d < 0.2) for d in v["delta"]):
            raise ConfigError(f"delta: every value must lie in (0, 1/5), got {v['delta']}")
    if "div_n" in v:
        try:
            v["div_n"] = [int(n) for n in v["div_n"]]
        except ValueError:
            raise ConfigError(f"div_n: expected integers, got {v['div_n']}") from None
    if v.get("lambda", 32.0) < 1:
        raise ConfigError("lambda: must be >= 1")


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


@dataclass
class Outcome:
    ok: bool
    files: list
    cells: list
    checks: dict


def _write(out: Path, name: str, text: str, files: list) -> None:
    path = out / name
    path.write_text(text)
    files.append(name)


def _times(t_max: float, count: int, include_zero: bool = False) -> tuple:
    ts = [t_max * (i + 1) / count for i in range(count)]
    return tuple(([0.0] if include_zero else []) + ts)


def _run_simulate(cfg: RunConfig, out: Path) -> Outcome:
    v = cfg.values
    p = cfg.equation
    g = cfg.grid
    if v["initial"] == "gaussian":
        u0 = smooth_datum(g, v["amplitude"])
    elif v["initial"] == "bump":
        u0 = build_bump(BumpSpec(), g).field
    elif v["initial"] == "peakon":
        u0 = make_peakon(v.get("c", 1.0), p.k, 0.0, v.get("mollify_cells", 4.0) * g.spacing, g, normalize_crest=True)
    else:
        kind = HIGH_K if p.k >= 3 else LOW_K
        u0 = make_pair(DataRegime(kind, v["n"], p.k, v["lambda"]), g).sum
    tol = 1e-4 if v["initial"] == "peakon" else 1e-6
    trace = solve(u0, p, cfg.solver, resolution_tol=tol)
    files = []
    if "json" in cfg.formats:
        _write(out, "trace.json", trace_to_json_text(trace, state_stride=max(1, g.points // 256)), files)
    if "csv" in cfg.formats:
        _write(out, "diagnostics.csv", trace.diagnostics_csv(), files)
    checks = {"completed": {"ok": trace.status == STATUS_COMPLETED, "status": trace.status}}
    if p.is_gchn:
        checks["h1_drift"] = {"ok": trace.h1_drift <= 1e-6, "value": trace.h1_drift}
    cells = [f"run: {trace.status}" + (f" ({trace.message})" if trace.message else "")]
    return Outcome(all(c["ok"] for c in checks.values()), files, cells, checks)


def _run_nonuniform(cfg: RunConfig, out: Path) -> Outcome:
    v = cfg.values
    sweep = Sweep(
        v["regime"], v["k"], tuple(range(v["n_min"], v["n_max"] + 1)), v["lambda"], v["L"], v.get("N")
    )
    rep = run_nonuniform_experiment(cfg.equation, sweep, _times(v["t_max"], 5), cfg.solver, jobs=v["jobs"])
    files = []
    if "json" in cfg.formats:
        _write(out, "nonuniform.json", report_to_json_text(rep), files)
    if "csv" in cfg.formats:
        _write(out, "nonuniform.csv", rep.to_csv(), files)
    cells = [f"n={c.n} t={c.t!r}: {c.status}" + (f" ({c.error})" if c.error else "") for c in rep.cells]
    return Outcome(rep.ok, files, cells, rep.checks)


def _run_approx(cfg: RunConfig, out: Path) -> Outcome:
    v = cfg.values
    rep = run_approx_experiment(
        v["k"], range(v["n_min"], v["n_max"] + 1), _times(v["t_max"], 5, include_zero=True), v["L"], v["jobs"]
    )
    files = []
    if "json" in cfg.formats:
        _write(out, "approx.json", report_to_json_text(rep), files)
    if "csv" in cfg.formats:
        _write(out, "approx.csv", rep.to_csv(), files)
    cells = [f"n={n}: " + ("error " + rep.errors[n] if n in rep.errors else "completed") for n in rep.n_values]
    return Outcome(rep.ok, files, cells, rep.checks)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _run_travelwave(cfg: RunConfig, out: Path) -> Outcome:
    v = cfg.values
    files, cells = [], []
    waves = []
    checks = {}
    for d in v["delta"]:
        w = solve_wave_ode(d)
        q = half_period_quadrature(d)
        b = w.bounds()
        row = {
            "delta": d,
            "half_period_ode": w.half_period,
            "half_period_quadrature": q,
            "relative_gap": abs(w.half_period - q) / q,
            "energy_residual": w.max_energy_residual,
            "range_ok": b["range"]["ok"],
            "slope_ok": b["slope"]["ok"],
            "period_ok": b["period"]["ok"],
            "even": w.is_even(),
        }
        row["ok"] = bool(
            row["relative_gap"] <= 1e-8 and row["energy_residual"] <= 1e-8
            and row["range_ok"] and row["slope_ok"] and row["period_ok"] and row["even"]
        )
        waves.append(row)
        cells.append(f"delta={d!r}: {'pass' if row['ok'] else 'FAIL'}")
    checks["wave_bounds"] = {"ok": all(r["ok"] for r in waves)}
    periods = []
    for n in range(v["n_min"], v["n_max"] + 1):
        try:
            d = delta_for_period(n)
            gap = abs(half_period(d) - math.pi / n)
            periods.append({"n": n, "delta": d, "gap": gap, "ok": gap <= 1e-10})
        except (ValueError, RuntimeError) as exc:
            periods.append({"n": n, "delta": math.nan, "gap": math.nan, "ok": False, "error": str(exc)})
        cells.append(f"period n={n}: {'pass' if periods[-1]['ok'] else 'FAIL'}")
    deltas = [p["delta"] for p in periods]
    checks["period_match"] = {"ok": all(p["ok"] for p in periods)}
    checks["delta_decreasing"] = {"ok": all(a > b for a, b in zip(deltas, deltas[1:]))}
    div_rows = []
    init = []
    resid = []
    for n in v["div_n"]:
        pair = traveling_pair(n)
        init.append(pair.c1_distance(0.0, v["N"]))
        resid.append(pair.ch_residual(v["N"]))
        for t in _times(v["t_max"], 10):
            r = divergence_check(n, t, pair)
            div_rows.append(r)
            cells.append(f"divergence n={n} t={t!r}: {'pass' if r.ok else 'FAIL'}")
        if "csv" in cfg.formats:
            _write(out, f"profile_n{n}.csv", pair.wave.to_csv(), files)
    checks["divergence"] = {"ok": all(r.ok for r in div_rows)}
    checks["ch_residual"] = {"ok": max(resid, default=0.0) <= 1e-6, "max": max(resid, default=0.0)}
    checks["initial_distance_decreasing"] = {"ok": all(a > b for a, b in zip(init, init[1:])), "values": init}
    if "json" in cfg.formats:
        doc = {
            "schema": "gkbch.travelwave_report/1",
            "waves": waves,
            "periods": periods,
            "divergence": [r.to_json() for r in div_rows],
            "initial_distance": dict(zip(map(str, v["div_n"]), init)),
            "ch_residual": dict(zip(map(str, v["div_n"]), resid)),
            "checks": checks,
        }
        _write(out, "travelwave.json", json.dumps(doc, indent=1, sort_keys=True, allow_nan=True), files)
    if "csv" in cfg.formats:
        lines = ["n,t,delta,lhs_c1,lhs_point,rhs,remainder,ratio,ok"]
        for r in div_rows:
            lines.append(",".join(_fmt(x) for x in (r.n, r.t, r.delta, r.lhs_c1, r.lhs_point, r.rhs, r.remainder, r.ratio, r.ok)))
        _write(out, "divergence.csv", "\n".join(lines) + "\n", files)
        lines = ["delta,half_period_ode,half_period_quadrature,relative_gap,energy_residual,ok"]
        for r in waves:
            lines.append(",".join(_fmt(r[c]) for c in ("delta", "half_period_ode", "half_period_quadrature", "relative_gap", "energy_residual", "ok")))
        _write(out, "waves.csv", "\n".join(lines) + "\n", files)
    return Outcome(all(c["ok"] for c in checks.values()), files, cells, checks)


def _run_peakon(cfg: RunConfig, out: Path) -> Outcome:
    v = cfg.values
    p = cfg.equation
    if not p.is_gchn:
        raise ConfigError(f"b: peakons need b = k + 1, got k={p.k}, b={p.b}")
    s = peakon_series(p.k, v["c"], v["N"], v["L"], v["mollify_cells"], v["t_final"], cfl_number=v["cfl_number"])
    files = []
    if "csv" in cfg.formats:
        _write(out, "peakon.csv", s.to_csv(), files)
    checks = {"shape_error": {"ok": s.ok, "max": s.max_error, "tol": s.tol}}
    if "json" in cfg.formats:
        doc = {"schema": "gkbch.peakon_report/1", "times": s.times.tolist(), "errors": s.errors.tolist(), "checks": checks}
        _write(out, "peakon.json", json.dumps(doc, indent=1, sort_keys=True), files)
    return Outcome(s.ok, files, [f"peakon: {'pass' if s.ok else 'FAIL'}"], checks)


def _run_invariants(cfg: RunConfig, out: Path) -> Outcome:
    v = cfg.values
    checks = invariants_report(seed=v["seed"], N=v["N"])
    files = []
    if "json" in cfg.formats:
        _write(out, "invariants.json", json.dumps(checks, indent=1, sort_keys=True), files)
    if "csv" in cfg.formats:
        lines = ["check,value,ok"] + [f"{k},{_fmt(c['value'])},{c['ok']}" for k, c in sorted(checks.items())]
        _write(out, "invariants.csv", "\n".join(lines) + "\n", files)
    cells = [f"{k}: {'pass' if c['ok'] else 'FAIL'}" for k, c in sorted(checks.items())]
    return Outcome(all(c["ok"] for c in checks.values()), files, cells, checks)


RUNNERS = {
    "simulate": _run_simulate,
    "experiment-nonuniform": _run_nonuniform,
    "experiment-approx": _run_approx,
    "experiment-travelwave": _run_travelwave,
    "validate-peakon": _run_peakon,
    "validate-invariants": _run_invariants,
}


def _manifest(cfg: RunConfig, outcome: Outcome, wall: float, error: str = "") -> str:
    lines = [f"command = {cfg.command}", "", "[config]"]
    for key in sorted(cfg.values):
        tag = "  # default" if key in cfg.defaulted else ""
        lines.append(f"{key} = {json.dumps(cfg.values[key])}{tag}")
    lines += [
        "",
        "[versions]",
        f"gkbch = {__version__}",
        f"python = {platform.python_version()}",
        f"numpy = {np.__version__}",
        f"scipy = {scipy.__version__}",
        f"pyyaml = {yaml.__version__}",
        "",
        "[outputs]",
        f"csv_schema_version = {CSV_SCHEMA_VERSION}",
    ]
    lines += [f"file = {f}" for f in outcome.files]
    lines += ["", "[checks]"]
    for name, c in sorted(outcome.checks.items()):
        lines.append(f"{name} = {'pass' if c.get('ok') else 'FAIL'}")
    lines += ["", "[cells]"] + outcome.cells
    failed = [c for c in outcome.cells if "FAIL" in c or "error" in c or "incomplete" in c]
    lines += ["", "[failed]"] + (failed or ["none"])
    if error:
        lines += ["", "[error]", error]
    lines += ["", "[run]", f"status = {'ok' if outcome.ok else 'failed'}", f"wall_time_s = {wall:.3f}"]
    lines += ["", "[timestamp]", datetime.now(timezone.utc).isoformat(timespec="seconds")]
    return "\n".join(lines) + "\n"


def execute(cfg: RunConfig) -> int:
    """Run the configured command, write artifacts and the manifest; return the exit status."""
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output_dir: {out} is not writable")
    start = time.perf_counter()
    error = ""
    try:
        outcome = RUNNERS[cfg.command](cfg, out)
    except Exception as exc:
        log.error("%s failed: %s", cfg.command, exc)
        error = f"{type(exc).__name__}: {exc}"
        outcome = Outcome(False, [], [f"run: error {error}"], {})
    wall = time.perf_counter() - start
    (out / "manifest.txt").write_text(_manifest(cfg, outcome, wall, error))
    for name, c in sorted(outcome.checks.items()):
        log.info("%s: %s", name, "pass" if c.get("ok") else "FAIL")
    return 0 if outcome.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkbch", description=__doc__.split("\n\n")[0].strip())
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="what to run (may also come from the config)")
    ap.add_argument("--config", type=Path, help="YAML or JSON file with flat keys")
    ap.add_argument("--jobs", type=int, help="worker processes (default: machine parallelism)")
    ap.add_argument("--output", help="output directory")
    ap.add_argument("--format", help="comma separated subset of json,csv")
    ap.add_argument("--k", type=int)
    ap.add_argument("--b", type=float)
    ap.add_argument("--n-min", type=int)
    ap.add_argument("--n-max", type=int)
    ap.add_argument("--t-max", type=float)
    ap.add_argument("--grid-n", type=int)
    ap.add_argument("--box-l", type=float)
    ap.add_argument("--lambda", dest="lam", type=float)
    ap.add_argument("--delta", help="comma separated wave amplitudes")
    return ap


def _setup_logging() -> None:
    level = os.environ.get("GKBCH_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    overrides = {
        "command": args.command,
        "output_dir": args.output,
        "formats": args.format,
        "k": args.k,
        "b": args.b,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "t_max": args.t_max,
        "N": args.grid_n,
        "L": args.box_l,
        "lambda": args.lam,
        "delta": args.delta,
        "jobs": args.jobs,
    }
    text = args.config.read_text() if args.config else None
    try:
        if args.jobs is None and not (text and "jobs" in (yaml.safe_load(text) or {})):
            overrides["jobs"] = os.cpu_count() or 1
        cfg = parse_config(text, overrides)
    except (ConfigError, ValueError, yaml.YAMLError) as exc:
        print(f"gkbch: configuration error: {exc}", file=sys.stderr)
        return 2
    status = execute(cfg)
    print(f"{cfg.command}: {'ok' if status == 0 else 'FAILED'} (outputs in {cfg.output_dir})")
    return status


if __name__ == "__main__":
    sys.exit(main())
