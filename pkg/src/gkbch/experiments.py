"""
Non-uniform dependence experiments.

For each n we evolve f_n + g_n and f_n, record the C1 distance of the two
solutions at the requested times, and compare its growth in t with the
reference rate c0. Two slopes are reported per n:

    fitted_slope     least-squares slope through the origin of the raw distance
    increment_slope  the same for ||D(t) - D(0)||_{C1}, D = S_t(f+g) - S_t(f)

At the n reachable on a desk the raw distance still carries the initial offset
||g_n||_{C1}, which makes the raw slope large for trivial reasons; the
increment isolates the part created by the dynamics.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .characteristics import BreakingError, BurgersEvaluator, Interpolant
from .dynamics import STATUS_COMPLETED, EquationParams, SolverConfig, solve
from .initdata import HIGH_K, LOW_K, BumpSpec, DataRegime, make_pair
from .norms import c1_norm, c1_parts
from .spectral import Grid, rderivative

log = logging.getLogger(__name__)

CSV_SCHEMA_VERSION = "1"
CSV_COLUMNS = (
    "n",
    "t",
    "initial_distance",
    "solution_distance",
    "w1",
    "w2",
    "status",
    "increment_distance",
    "approx_distance",
)
# the decay test accepts per-step ratios in [0.7, 0.9] around 2^(-1/3); the
# same relative band is used for any rate
RATIO_BAND = (0.7 / 2.0 ** (-1.0 / 3.0), 0.9 / 2.0 ** (-1.0 / 3.0))
DEFAULT_TIMES = (0.02, 0.04, 0.06, 0.08, 0.1)
DEFAULT_BOX = {HIGH_K: 50.0, LOW_K: 25.0}


@dataclass(frozen=True)
class Sweep:
    """The family of data to run: regime kind, exponent, n range and lambda."""

    kind: str
    k: int
    n_values: tuple
    lam: float = 32.0
    half_length: float | None = None
    points: int | None = None

    def __post_init__(self):
        ns = tuple(sorted(int(n) for n in self.n_values))
        if not ns:
            raise ValueError("empty n sweep")
        object.__setattr__(self, "n_values", ns)
        for n in ns:
            self.regime(n)

    @property
    def box(self) -> float:
        return float(self.half_length if self.half_length is not None else DEFAULT_BOX[self.kind])

    def regime(self, n: int) -> DataRegime:
        return DataRegime(self.kind, n, self.k, self.lam)

    def grid(self, n: int) -> Grid:
        reg = self.regime(n)
        if self.points is None:
            return reg.grid_for(self.box)
        # a fixed N must still satisfy the resolution rule (checked in make_pair)
        return Grid(self.box, self.points)

    @property
    def rate(self) -> float:
        """Predicted ratio of consecutive initial distances."""
        return 2.0 ** (-1.0 / self.k) if self.kind == HIGH_K else 0.5


def c0_reference(kind: str, k: int, phi0: float, lam: float = 32.0) -> float:
    """phi(0)^(k+1)/2 in the high_k regime, lambda^2 phi(0)^2/2 in the low_k regime."""
    if kind == HIGH_K:
        return phi0 ** (k + 1) / 2.0
    return lam**2 * phi0**2 / 2.0


@dataclass
class Cell:
    n: int
    t: float
    initial_distance: float
    solution_distance: float
    increment_distance: float
    approx_distance: float = math.nan
    w1: float = math.nan
    w2: float = math.nan
    status: str = STATUS_COMPLETED
    error: str = ""


@dataclass
class NonUniformReport:
    params: EquationParams
    sweep: Sweep
    times: tuple
    phi0: float
    c0_reference: float
    cells: list
    grid_points: dict
    fitted_slope: dict
    increment_slope: dict
    initial_distance: dict
    h1_drift: dict
    constant: float
    checks: dict = field(default_factory=dict)

    @property
    def slope_floor(self) -> float:
        return 0.5 * self.c0_reference

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def to_json(self) -> dict:
        return {
            "schema": "gkbch.nonuniform_report/1",
            "params": {"k": self.params.k, "b": self.params.b},
            "sweep": {
                "kind": self.sweep.kind,
                "k": self.sweep.k,
                "n_values": list(self.sweep.n_values),
                "lambda": self.sweep.lam,
                "half_length": self.sweep.box,
            },
            "times": list(self.times),
            "phi0": self.phi0,
            "c0_reference": self.c0_reference,
            "slope_floor": self.slope_floor,
            "constant": self.constant,
            "grid_points": {str(n): v for n, v in self.grid_points.items()},
            "fitted_slope": {str(n): v for n, v in self.fitted_slope.items()},
            "increment_slope": {str(n): v for n, v in self.increment_slope.items()},
            "initial_distance": {str(n): v for n, v in self.initial_distance.items()},
            "h1_drift": {str(n): v for n, v in self.h1_drift.items()},
            "checks": self.checks,
            "ok": self.ok,
            "cells": [asdict(c) for c in self.cells],
        }

    def to_csv(self) -> str:
        return cells_to_csv(self.cells)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def cells_to_csv(cells) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in cells:
        w.writerow([_fmt(getattr(c, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def slope_through_origin(t, d) -> float:
    t = np.asarray(t, dtype=float)
    d = np.asarray(d, dtype=float)
    return float(t @ d / (t @ t))


def _c1_of(values: np.ndarray, L: float) -> float:
    return c1_parts(values, rderivative(values, L, 1))


def _run_n(job):
    """Everything for one n: two PDE solves plus, for k >= 3, the transport oracle."""
    p, sweep, n, times, cfg, degenerate = job
    reg = sweep.regime(n)
    grid = sweep.grid(n)
    pair = make_pair(reg, grid, BumpSpec())
    f = pair.f
    g = pair.g * 0.0 if degenerate else pair.g
    L = grid.half_length
    init = c1_norm(g)
    run_cfg = SolverConfig(
        dt_initial=cfg.dt_initial,
        cfl_number=cfg.cfl_number,
        t_final=max(times),
        breaking_threshold=cfg.breaking_threshold,
        conservation_check_interval=cfg.conservation_check_interval,
    )
    cells = []
    out = {"n": n, "points": grid.points, "init": init, "phi0": pair.bump.phi0}
    try:
        A = solve(f + g, p, run_cfg, save_times=times)
        B = solve(f, p, run_cfg, save_times=times)
    except Exception as exc:  # tagged, never dropped
        log.error("n=%d: solve failed: %s", n, exc)
        out["cells"] = [Cell(n, t, init, math.nan, math.nan, status="error", error=str(exc)) for t in times]
        out["h1_drift"] = math.nan
        return out
    out["h1_drift"] = max(A.h1_drift, B.h1_drift)
    approx = None
    if p.k >= 3 and sweep.kind == HIGH_K:
        approx = (Interpolant(f + g), Interpolant(f))
    for t in times:
        status = STATUS_COMPLETED
        err = ""
        try:
            ua = A.state_at(t).values
            ub = B.state_at(t).values
        except KeyError:
            reason = A.message or B.message or "run stopped early"
            cells.append(Cell(n, t, init, math.nan, math.nan, status="incomplete", error=reason))
            continue
        D = ua - ub
        dist = _c1_of(D, L)
        inc = _c1_of(D - g.values, L)
        cell = Cell(n, t, init, dist, inc, status=status, error=err)
        if approx is not None:
            try:
                va, vxa = BurgersEvaluator(f + g, t, p.k, interp=approx[0]).on_grid()
                vb, vxb = BurgersEvaluator(f, t, p.k, interp=approx[1]).on_grid()
                cell.approx_distance = c1_parts(va - vb, vxa - vxb)
                cell.w1 = c1_parts(ua - va, rderivative(ua, L, 1) - vxa)
                cell.w2 = c1_parts(ub - vb, rderivative(ub, L, 1) - vxb)
            except BreakingError as exc:
                cell.status = "transport_breaking"
                cell.error = str(exc)
        cells.append(cell)
    out["cells"] = cells
    return out


def _map(func, jobs_list, jobs: int):
    if jobs <= 1 or len(jobs_list) <= 1:
        return [func(j) for j in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(func, jobs_list))


def run_nonuniform_experiment(
    p: EquationParams,
    sweep: Sweep,
    times=DEFAULT_TIMES,
    cfg: SolverConfig | None = None,
    jobs: int = 1,
    degenerate: bool = False,
) -> NonUniformReport:
    """Run the two-sided test for every n in the sweep.

    Args:
        p: equation parameters; p.k must match sweep.k.
        sweep: regime and n values.
        times: positive observation times.
        cfg: solver settings; t_final is replaced by max(times).
        jobs: worker processes (results do not depend on this).
        degenerate: use g_n = 0, i.e. identical data; every distance is 0.
    """
    if p.k != sweep.k:
        raise ValueError(f"equation k={p.k} does not match sweep k={sweep.k}")
    times = tuple(sorted(float(t) for t in times))
    if not times or times[0] <= 0:
        raise ValueError("times must be positive")
    cfg = cfg or SolverConfig(cfl_number=1.0, dt_initial=1.0, conservation_check_interval=1000)
    results = _map(_run_n, [(p, sweep, n, times, cfg, degenerate) for n in sweep.n_values], jobs)
    phi0 = results[0]["phi0"]
    c0 = c0_reference(sweep.kind, sweep.k, phi0, sweep.lam)
    cells = [c for r in results for c in r["cells"]]
    fitted, incs, init, drift, points = {}, {}, {}, {}, {}
    T = np.array(times)
    for r in results:
        n = r["n"]
        points[n] = r["points"]
        init[n] = r["init"]
        drift[n] = r["h1_drift"]
        d = np.array([c.solution_distance for c in r["cells"]])
        e = np.array([c.increment_distance for c in r["cells"]])
        fitted[n] = slope_through_origin(T, d)
        incs[n] = slope_through_origin(T, e)
    # C measured once from phi: ||phi||_C1 on the grid of the smallest n
    first = make_pair(sweep.regime(sweep.n_values[0]), sweep.grid(sweep.n_values[0]))
    constant = c1_norm(first.bump.field)
    report = NonUniformReport(
        p, sweep, times, phi0, c0, cells, points, fitted, incs, init, drift, constant
    )
    if not degenerate:
        report.checks = _nonuniform_checks(report)
    else:
        zero = all(c.solution_distance == 0.0 for c in cells)
        report.checks = {"degenerate_zero": {"ok": zero}}
    for name, c in report.checks.items():
        log.info("check %s: %s", name, "pass" if c["ok"] else "FAIL")
    return report


def _nonuniform_checks(rep: NonUniformReport) -> dict:
    sw = rep.sweep
    ns = sw.n_values
    checks = {}
    checks["cells_completed"] = {
        "ok": all(c.status == STATUS_COMPLETED for c in rep.cells),
        "failed": [(c.n, c.t, c.status) for c in rep.cells if c.status != STATUS_COMPLETED],
    }
    lo, hi = sw.rate * RATIO_BAND[0], sw.rate * RATIO_BAND[1]
    ratios = [rep.initial_distance[b] / rep.initial_distance[a] for a, b in zip(ns, ns[1:])]
    checks["initial_distance_decay"] = {
        "ok": bool(ratios) and all(lo <= r <= hi for r in ratios),
        "ratios": ratios,
        "band": [lo, hi],
        "rate": sw.rate,
    }
    exponent = 1.0 / sw.k if sw.kind == HIGH_K else 1.0
    bound = rep.constant * 2.0 ** (-ns[0] * exponent) * (1 + 1e-9)
    checks["initial_distance_bound"] = {
        "ok": max(rep.initial_distance.values()) <= bound,
        "max": max(rep.initial_distance.values()),
        "bound": bound,
    }
    floor = rep.slope_floor
    checks["fitted_slope_floor"] = {
        "ok": all(s >= floor for s in rep.fitted_slope.values()),
        "min": min(rep.fitted_slope.values()),
        "floor": floor,
    }
    checks["increment_slope_floor"] = {
        "ok": all(s >= floor for s in rep.increment_slope.values()),
        "min": min(rep.increment_slope.values()),
        "floor": floor,
    }
    if sw.kind == HIGH_K and rep.params.k >= 3:
        worst = 0.0
        ok = True
        for c in rep.cells:
            gap = abs(c.solution_distance - c.approx_distance) - (c.w1 + c.w2)
            if not (gap <= 1e-12 * max(1.0, c.solution_distance)):
                ok = False
            worst = max(worst, gap) if math.isfinite(gap) else math.inf
        checks["decomposition"] = {"ok": ok, "worst_excess": worst}
    return checks


# ---------------------------------------------------------------------------
# pure transport version
# ---------------------------------------------------------------------------


@dataclass
class ApproxReport:
    k: int
    n_values: tuple
    times: tuple
    phi0: float
    c0: float
    distance: dict
    increment: dict
    initial_distance: dict
    errors: dict
    checks: dict

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def to_json(self) -> dict:
        return {
            "schema": "gkbch.approx_report/1",
            "k": self.k,
            "n_values": list(self.n_values),
            "times": list(self.times),
            "phi0": self.phi0,
            "c0": self.c0,
            "distance": {str(n): v for n, v in self.distance.items()},
            "increment": {str(n): v for n, v in self.increment.items()},
            "initial_distance": {str(n): v for n, v in self.initial_distance.items()},
            "errors": {str(n): v for n, v in self.errors.items()},
            "checks": self.checks,
            "ok": self.ok,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "t", "distance", "increment"])
        for n in self.n_values:
            for t, d, e in zip(self.times, self.distance[n], self.increment[n]):
                w.writerow([n, _fmt(t), _fmt(d), _fmt(e)])
        return buf.getvalue()


def _approx_n(job):
    k, n, times, L = job
    reg = DataRegime(HIGH_K, n, k)
    pair = make_pair(reg, reg.grid_for(L))
    s, f = pair.sum, pair.f
    Is, If = Interpolant(s), Interpolant(f)
    g = pair.g.values
    dist, inc = [], []
    try:
        for t in times:
            va, vxa = BurgersEvaluator(s, t, k, interp=Is).on_grid()
            vb, vxb = BurgersEvaluator(f, t, k, interp=If).on_grid()
            dist.append(c1_parts(va - vb, vxa - vxb))
            gx = rderivative(g, pair.f.grid.half_length, 1)
            inc.append(c1_parts(va - vb - g, vxa - vxb - gx))
        err = ""
    except BreakingError as exc:
        err = f"{exc} bracket={exc.bracket}"
    return {"n": n, "phi0": pair.bump.phi0, "init": c1_norm(pair.g), "dist": dist, "inc": inc, "err": err}


def run_approx_experiment(
    k: int,
    n_values,
    times=(0.0,) + DEFAULT_TIMES,
    half_length: float = 50.0,
    jobs: int = 1,
) -> ApproxReport:
    """Transport-only experiment through characteristics (no PDE solve).

    Checks, for every n: the distance at t = 0 equals ||g_n||_{C1}; the distance
    is at least c0 t; and the increment ||D(t) - g_n||_{C1} / t at the largest t
    is at least c0 / 2.
    """
    if k < 3:
        raise ValueError("the transport experiment uses the high_k data, k >= 3")
    times = tuple(sorted(float(t) for t in times))
    if times[0] < 0:
        raise ValueError("times must be nonnegative")
    ns = tuple(sorted(int(n) for n in n_values))
    res = _map(_approx_n, [(k, n, times, half_length) for n in ns], jobs)
    phi0 = res[0]["phi0"]
    c0 = phi0 ** (k + 1) / 2.0
    dist = {r["n"]: r["dist"] for r in res}
    inc = {r["n"]: r["inc"] for r in res}
    init = {r["n"]: r["init"] for r in res}
    errors = {r["n"]: r["err"] for r in res if r["err"]}
    checks = {"no_breaking": {"ok": not errors}}
    if not errors:
        # (f + g) - f differs from g only by rounding
        at0 = [abs(dist[n][0] - init[n]) / init[n] for n in ns if times[0] == 0.0]
        checks["initial_exact"] = {"ok": all(a <= 1e-12 for a in at0), "max_gap": max(at0, default=0.0)}
        lower = all(d >= c0 * t for n in ns for t, d in zip(times, dist[n]))
        checks["distance_lower_bound"] = {"ok": lower}
        plateau = {n: inc[n][-1] / times[-1] for n in ns}
        checks["increment_plateau"] = {
            "ok": all(v >= 0.5 * c0 for v in plateau.values()),
            "plateau": {str(n): v for n, v in plateau.items()},
            "floor": 0.5 * c0,
        }
    return ApproxReport(k, ns, times, phi0, c0, dist, inc, init, errors, checks)


def report_to_json_text(report) -> str:
    return json.dumps(report.to_json(), indent=1, sort_keys=True, allow_nan=True)
