"""
Time evolution of the generalized Camassa-Holm family in transport form

    u_t + u^k u_x = P(u),
    P(u) = -d_x (1 - d_xx)^{-1} [ b/(k+1) u^{k+1} + (3k - b)/2 u^{k-1} u_x^2 ]
           - (1 - d_xx)^{-1} [ (k-1)(b-k)/2 u^{k-2} u_x^3 ].

The state is kept band-limited below the dealiasing cutoff for degree k+1
products, so every nonlinear term is computed without aliasing. Time stepping
is classical RK4 under dt <= cfl * dx / max(1, ||u||_inf^k).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    BlowUpError,
    Field,
    Grid,
    ResolutionError,
    _rxi,
    dealias_mask_r,
    helmholtz_symbol,
    rderivative,
    spectral_tail,
)

log = logging.getLogger(__name__)

STATUS_RUNNING = "running"
STATUS_COMPLETED = "completed"
STATUS_BREAKING = "wave_breaking"
STATUS_BLOWUP = "blow_up"


class CFLError(ValueError):
    """Requested time step violates the CFL restriction."""


@dataclass(frozen=True)
class EquationParams:
    """Family member (k, b). CH is (1, 2), DP is (1, 3), Novikov is (2, 3)."""

    k: int
    b: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not math.isfinite(self.b):
            raise ValueError(f"b must be finite, got {self.b}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "b", float(self.b))

    @property
    def is_gchn(self) -> bool:
        return self.b == self.k + 1

    @property
    def degree(self) -> int:
        return self.k + 1

    def coefficients(self) -> tuple[float, float, float]:
        k, b = self.k, self.b
        return b / (k + 1), (3 * k - b) / 2.0, (k - 1) * (b - k) / 2.0


CH = EquationParams(1, 2.0)
DP = EquationParams(1, 3.0)
NOVIKOV = EquationParams(2, 3.0)


@dataclass(frozen=True)
class SolverConfig:
    dt_initial: float = 1e-2
    cfl_number: float = 0.5
    t_final: float = 1.0
    breaking_threshold: float = 1e3
    conservation_check_interval: int = 1

    def __post_init__(self):
        for name in ("dt_initial", "t_final", "breaking_threshold"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")
        if not (0 < self.cfl_number <= 1):
            raise ValueError(f"cfl_number must lie in (0, 1], got {self.cfl_number}")
        if int(self.conservation_check_interval) != self.conservation_check_interval or (
            self.conservation_check_interval < 1
        ):
            raise ValueError("conservation_check_interval must be a positive integer")


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------


class _Kernel:
    """Spectral symbols for one (grid, params) pair, reused across steps."""

    def __init__(self, grid: Grid, p: EquationParams, include_nonlocal: bool = True):
        self.grid = grid
        self.p = p
        self.include_nonlocal = include_nonlocal
        L, N = grid.half_length, grid.points
        xi = _rxi(L, N)
        self.N = N
        self.ikx = 1j * xi
        self.ikx_odd = self.ikx.copy()
        self.ikx_odd[-1] = 0.0
        self.mask = dealias_mask_r(N, p.degree)
        helm = helmholtz_symbol(L, N)
        c1, c2, c3 = p.coefficients()
        k = p.k
        # u^k u_x = d_x u^{k+1} / (k+1), folded together with the first P term
        sym_transport = -self.ikx_odd / (k + 1) * self.mask
        self.sym_p_pow = -self.ikx_odd * c1 * helm * self.mask
        self.sym_pow = self.sym_p_pow + sym_transport if include_nonlocal else sym_transport
        self.sym_grad2 = -self.ikx_odd * c2 * helm * self.mask
        self.sym_grad3 = -c3 * helm * self.mask
        self.has_grad2 = c2 != 0.0
        # (k-1)(b-k)/2 vanishes identically for k = 1; u^(k-2) is never formed then
        self.has_cubic = k > 1 and c3 != 0.0

    def fields(self, uh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = np.fft.irfft(uh, n=self.N)
        ux = np.fft.irfft(self.ikx_odd * uh, n=self.N)
        return u, ux

    def _nonlocal_extra(self, u: np.ndarray, ux: np.ndarray) -> np.ndarray | None:
        k = self.p.k
        out = None
        if self.has_grad2:
            g2 = ux * ux if k == 1 else _pow(u, k - 1) * ux * ux
            out = self.sym_grad2 * np.fft.rfft(g2)
        if self.has_cubic:
            g3 = ux**3 if k == 2 else _pow(u, k - 2) * ux**3
            term = self.sym_grad3 * np.fft.rfft(g3)
            out = term if out is None else out + term
        return out

    def rhs_hat(self, u: np.ndarray, ux: np.ndarray) -> np.ndarray:
        out = self.sym_pow * np.fft.rfft(_pow(u, self.p.k + 1))
        if self.include_nonlocal:
            extra = self._nonlocal_extra(u, ux)
            if extra is not None:
                out += extra
        return out

    def nonlocal_hat(self, u: np.ndarray, ux: np.ndarray) -> np.ndarray:
        out = self.sym_p_pow * np.fft.rfft(_pow(u, self.p.k + 1))
        extra = self._nonlocal_extra(u, ux)
        if extra is not None:
            out += extra
        return out


def _pow(u: np.ndarray, j: int) -> np.ndarray:
    if j == 1:
        return u
    if j == 2:
        return u * u
    return u**j


def compute_P(u: Field, p: EquationParams) -> Field:
    """The nonlocal term P(u), assembled from dealiased products."""
    _finite(u)
    ker = _Kernel(u.grid, p)
    uh = np.fft.rfft(u.values)
    uu, ux = ker.fields(uh)
    return Field(u.grid, np.fft.irfft(ker.nonlocal_hat(uu, ux), n=u.grid.points))


def rhs(u: Field, p: EquationParams, include_nonlocal: bool = True) -> Field:
    """P(u) - u^k u_x; with ``include_nonlocal=False`` only the Burgers part remains."""
    _finite(u)
    ker = _Kernel(u.grid, p, include_nonlocal)
    uh = np.fft.rfft(u.values)
    uu, ux = ker.fields(uh)
    return Field(u.grid, np.fft.irfft(ker.rhs_hat(uu, ux), n=u.grid.points))


def momentum(u: Field) -> Field:
    """m = u - u_xx."""
    _finite(u)
    return Field(u.grid, u.values - rderivative(u.values, u.grid.half_length, 2))


def max_stable_dt(u_sup: float, grid: Grid, p: EquationParams, cfl: float) -> float:
    return cfl * grid.spacing / max(1.0, u_sup**p.k)


def _rk4(ker: _Kernel, uh: np.ndarray, dt: float, first=None) -> np.ndarray:
    if first is None:
        u, ux = ker.fields(uh)
        k1 = ker.rhs_hat(u, ux)
    else:
        k1 = first
    a = uh + 0.5 * dt * k1
    k2 = ker.rhs_hat(*ker.fields(a))
    a = uh + 0.5 * dt * k2
    k3 = ker.rhs_hat(*ker.fields(a))
    a = uh + dt * k3
    k4 = ker.rhs_hat(*ker.fields(a))
    return uh + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(
    u: Field,
    dt: float,
    p: EquationParams,
    cfl_number: float = 1.0,
    include_nonlocal: bool = True,
) -> Field:
    """One classical RK4 step.

    Raises:
        CFLError: if dt exceeds cfl_number * dx / max(1, ||u||^k).
    """
    _finite(u)
    limit = max_stable_dt(float(np.max(np.abs(u.values))), u.grid, p, cfl_number)
    if dt > limit * (1 + 1e-12):
        raise CFLError(f"dt={dt:.3e} exceeds CFL limit {limit:.3e}")
    ker = _Kernel(u.grid, p, include_nonlocal)
    uh = np.fft.rfft(u.values) * ker.mask
    new = np.fft.irfft(_rk4(ker, uh, dt), n=u.grid.points)
    if not np.all(np.isfinite(new)):
        raise BlowUpError("RK4 step produced non-finite values")
    return Field(u.grid, new)


# ---------------------------------------------------------------------------
# full solve
# ---------------------------------------------------------------------------


@dataclass
class SolutionTrace:
    """Result of :func:`solve`.

    ``times`` and the diagnostics arrays are recorded on every checked step;
    full states are kept only at ``state_times`` (always including 0 and the
    final time reached), since storing every step of a 2^20-point run does not
    fit in memory.
    """

    params: EquationParams
    grid: Grid
    times: np.ndarray
    linf: np.ndarray
    c1: np.ndarray
    h1: np.ndarray
    min_slope: np.ndarray
    statuses: list
    state_times: np.ndarray
    states: list
    status: str
    size_estimate_failure_time: float | None = None
    initial_c1: float = 0.0
    message: str = ""
    steps: int = 0

    @property
    def final(self) -> Field:
        return self.states[-1]

    def state_at(self, t: float) -> Field:
        idx = np.flatnonzero(np.abs(self.state_times - t) <= 1e-12 * max(1.0, abs(t)))
        if idx.size == 0:
            raise KeyError(f"no stored state at t={t}")
        return self.states[int(idx[0])]

    @property
    def h1_drift(self) -> float:
        h0 = self.h1[0]
        if h0 == 0.0:
            return float(np.max(np.abs(self.h1)))
        return float(np.max(np.abs(self.h1 - h0)) / h0)

    @property
    def empirical_lifespan(self) -> float | None:
        """First time the size estimate ||u||_{C1} <= 2 ||u0||_{C1} failed, if ever."""
        return self.size_estimate_failure_time

    def diagnostics_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "linf", "c1", "h1", "min_slope", "status"])
        for i in range(self.times.size):
            w.writerow(
                [
                    _fmt(self.times[i]),
                    _fmt(self.linf[i]),
                    _fmt(self.c1[i]),
                    _fmt(self.h1[i]),
                    _fmt(self.min_slope[i]),
                    self.statuses[i],
                ]
            )
        return buf.getvalue()

    def to_json(self, state_stride: int | None = None) -> dict:
        """JSON-ready document; states are downsampled by ``state_stride`` if given."""
        doc = {
            "schema": "gkbch.solution_trace/1",
            "params": {"k": self.params.k, "b": self.params.b},
            "grid": {"half_length": self.grid.half_length, "points": self.grid.points},
            "status": self.status,
            "message": self.message,
            "steps": self.steps,
            "initial_c1": self.initial_c1,
            "size_estimate_failure_time": self.size_estimate_failure_time,
            "h1_drift": self.h1_drift,
            "times": self.times.tolist(),
            "diagnostics": {
                "linf": self.linf.tolist(),
                "c1": self.c1.tolist(),
                "h1": self.h1.tolist(),
                "min_slope": self.min_slope.tolist(),
                "status": list(self.statuses),
            },
        }
        if state_stride:
            doc["states"] = {
                "stride": int(state_stride),
                "x": self.grid.x[::state_stride].tolist(),
                "times": self.state_times.tolist(),
                "values": [s.values[::state_stride].tolist() for s in self.states],
            }
        return doc


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def check_resolved(u0: Field, p: EquationParams, tol: float = 1e-6) -> None:
    tail = spectral_tail(u0.values, p.degree)
    if tail > tol:
        raise ResolutionError(
            f"initial datum has relative spectral content {tail:.2e} beyond the "
            f"dealiasing cutoff for k={p.k}; refine the grid or smooth the datum"
        )


def solve(
    u0: Field,
    p: EquationParams,
    cfg: SolverConfig,
    save_times=None,
    include_nonlocal: bool = True,
    resolution_tol: float = 1e-6,
) -> SolutionTrace:
    """Integrate from u0 up to cfg.t_final, or until breaking / blow-up.

    Args:
        u0: initial datum, must be resolved below the dealiasing cutoff.
        p: equation parameters.
        cfg: solver settings.
        save_times: extra times at which the full state is stored; the
            integrator lands on each exactly.
        include_nonlocal: drop P(u) when False (pure Burgers-type transport).
        resolution_tol: admissible relative spectral content beyond the cutoff.
    """
    _finite(u0)
    check_resolved(u0, p, resolution_tol)
    grid = u0.grid
    ker = _Kernel(grid, p, include_nonlocal)
    targets = sorted({float(t) for t in (save_times or []) if 0 < t < cfg.t_final})
    targets.append(float(cfg.t_final))

    uh = np.fft.rfft(u0.values) * ker.mask
    u, ux = ker.fields(uh)
    c1_0 = float(np.max(np.abs(u0.values)) + np.max(np.abs(ux)))

    times, linf, c1, h1, mins, statuses = [], [], [], [], [], []
    state_times, states = [0.0], [u0]
    fail_time = None
    status = STATUS_RUNNING
    message = ""

    def record(t, u, ux, uh, st):
        nonlocal fail_time
        lin = float(np.max(np.abs(u)))
        c = lin + float(np.max(np.abs(ux)))
        times.append(t)
        linf.append(lin)
        c1.append(c)
        h1.append(_h1_from_hat(uh, grid))
        mins.append(float(np.min(ux)))
        statuses.append(st)
        if fail_time is None and c > 2.0 * c1_0 + 1e-6:
            fail_time = t
            log.info("size estimate ||u||_C1 <= 2||u0||_C1 first fails at t=%.6g", t)

    record(0.0, u, ux, uh, STATUS_RUNNING)
    t = 0.0
    nstep = 0
    target_idx = 0
    interval = int(cfg.conservation_check_interval)
    while target_idx < len(targets):
        target = targets[target_idx]
        k1 = ker.rhs_hat(u, ux)
        dt = min(cfg.dt_initial, max_stable_dt(float(np.max(np.abs(u))), grid, p, cfg.cfl_number))
        landing = False
        if t + dt >= target - 1e-14 * max(1.0, target):
            dt = target - t
            landing = True
        uh = _rk4(ker, uh, dt, first=k1)
        t = target if landing else t + dt
        nstep += 1
        u, ux = ker.fields(uh)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(ux))):
            status, message = STATUS_BLOWUP, f"non-finite state at t={t:.6g}"
            bad = Field(grid, u, blow_up=True)
            times.append(t)
            linf.append(float("nan"))
            c1.append(float("nan"))
            h1.append(float("nan"))
            mins.append(float("nan"))
            statuses.append(status)
            state_times.append(t)
            states.append(bad)
            break
        slope = float(np.max(np.abs(ux)))
        if slope > cfg.breaking_threshold:
            status = STATUS_BREAKING
            message = f"sup|u_x|={slope:.3e} exceeded {cfg.breaking_threshold:g} at t={t:.6g}"
            record(t, u, ux, uh, status)
            state_times.append(t)
            states.append(Field(grid, u))
            break
        if landing or nstep % interval == 0:
            record(t, u, ux, uh, STATUS_RUNNING)
        if landing:
            state_times.append(t)
            states.append(Field(grid, u))
            target_idx += 1
    else:
        status = STATUS_COMPLETED
        statuses[-1] = STATUS_COMPLETED
    if message:
        log.warning("solve stopped: %s", message)

    return SolutionTrace(
        params=p,
        grid=grid,
        times=np.array(times),
        linf=np.array(linf),
        c1=np.array(c1),
        h1=np.array(h1),
        min_slope=np.array(mins),
        statuses=statuses,
        state_times=np.array(state_times),
        states=states,
        status=status,
        size_estimate_failure_time=fail_time,
        initial_c1=c1_0,
        message=message,
        steps=nstep,
    )


def _h1_from_hat(uh: np.ndarray, grid: Grid) -> float:
    N = grid.points
    xi = _rxi(grid.half_length, N)
    w = np.full(uh.size, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    e = np.sum(w * (1.0 + xi**2) * (uh.real**2 + uh.imag**2)) * (2.0 * grid.half_length) / N**2
    return float(np.sqrt(e))


def _finite(u: Field) -> None:
    if u.blow_up or not np.all(np.isfinite(u.values)):
        raise BlowUpError("field has non-finite samples")


def trace_to_json_text(trace: SolutionTrace, state_stride: int | None = None) -> str:
    return json.dumps(trace.to_json(state_stride), indent=1, allow_nan=True)
