"""
Exact-in-space solution of the transport equation v_t + v^k v_x = 0.

Along characteristics v is constant, so the flow map is phi(t, x) = x + t u0(x)^k
and v(t, phi(t, x)) = u0(x). On the Lagrangian nodes everything is exact. To
get v on the Eulerian grid we invert phi by Newton's method, with u0 and u0'
represented by periodic quintic splines through their spectrally upsampled
samples; the derivative follows from the chain rule

    v_x(t, phi(t, x)) = u0'(x) / (1 + t k u0(x)^(k-1) u0'(x)),

never from differentiating resampled values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import interpolate, optimize

from .dynamics import EquationParams, SolverConfig, solve
from .norms import c1_parts
from .spectral import Field, Grid, fourier_interpolate, rderivative

log = logging.getLogger(__name__)

UPSAMPLE = 8
SPLINE_DEGREE = 5
CROSSING_GAP = 1e-12


class BreakingError(ValueError):
    """Characteristics have crossed (or are about to) before the requested time.

    Attributes:
        bracket: (lower, upper) estimate of the crossing time; the lower end is
            the continuous estimate -1/min(k u0^(k-1) u0'), the upper end the
            first time two grid departure points meet.
    """

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


class PreconditionError(ValueError):
    """Requested time exceeds the admissible window T2."""


@dataclass(frozen=True)
class FlowMap:
    grid: Grid
    departure_points: np.ndarray
    time: float

    def __post_init__(self):
        pts = np.array(self.departure_points, dtype=float, copy=True)
        pts.setflags(write=False)
        object.__setattr__(self, "departure_points", pts)


@dataclass(frozen=True)
class BurgersSolution:
    u0: Field
    time: float
    flow: FlowMap
    values_on_flow: np.ndarray

    def sup(self) -> float:
        return float(np.max(np.abs(self.values_on_flow)))


def crossing_time(u0: Field, k: int) -> float:
    """-1 / min(k u0^(k-1) u0') on the grid; inf if characteristics never cross."""
    ux = rderivative(u0.values, u0.grid.half_length, 1)
    rate = k * u0.values ** (k - 1) * ux if k > 1 else ux
    lo = float(np.min(rate))
    return math.inf if lo >= 0 else -1.0 / lo


def _discrete_crossing(u0: Field, k: int) -> float:
    # first t at which x_{j+1} + t a_{j+1} <= x_j + t a_j for some j (periodically)
    a = u0.values**k
    da = np.diff(np.append(a, a[0]))
    neg = da < 0
    if not np.any(neg):
        return math.inf
    return float(np.min((u0.grid.spacing - CROSSING_GAP) / -da[neg]))


def burgers_flow(u0: Field, t: float, k: int) -> FlowMap:
    """phi(t, x_j) = x_j + t u0(x_j)^k.

    Raises:
        BreakingError: if adjacent departure points come within 1e-12 or invert.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    x = u0.grid.x
    if t == 0:
        return FlowMap(u0.grid, x, 0.0)
    pts = x + t * u0.values**k
    gaps = np.diff(np.append(pts, pts[0] + 2.0 * u0.grid.half_length))
    if np.min(gaps) <= CROSSING_GAP:
        bracket = (crossing_time(u0, k), _discrete_crossing(u0, k))
        raise BreakingError(
            f"characteristics cross before t={t:.6g}; crossing time in "
            f"[{bracket[0]:.6g}, {bracket[1]:.6g}]",
            bracket,
        )
    return FlowMap(u0.grid, pts, float(t))


def burgers_solution(u0: Field, t: float, k: int) -> BurgersSolution:
    flow = burgers_flow(u0, t, k)
    return BurgersSolution(u0, float(t), flow, np.array(u0.values))


class Interpolant:
    """Periodic splines of u0 and u0' on a grid refined by spectral upsampling."""

    def __init__(self, u0: Field, factor: int = UPSAMPLE):
        g = u0.grid
        L = g.half_length
        vals = fourier_interpolate(u0.values, factor)
        slope = fourier_interpolate(rderivative(u0.values, L, 1), factor)
        M = vals.size
        xs = -L + np.arange(M + 1) * (2.0 * L / M)
        self.L = L
        self.u = interpolate.make_interp_spline(
            xs, np.append(vals, vals[0]), k=SPLINE_DEGREE, bc_type="periodic"
        )
        self.du = interpolate.make_interp_spline(
            xs, np.append(slope, slope[0]), k=SPLINE_DEGREE, bc_type="periodic"
        )

    def _wrap(self, x):
        return np.mod(x + self.L, 2.0 * self.L) - self.L

    def value(self, x):
        return self.u(self._wrap(x))

    def slope(self, x):
        return self.du(self._wrap(x))


class BurgersEvaluator:
    """Eulerian evaluation of v(t, .) at arbitrary points.

    Args:
        u0: initial datum.
        t: time, below the crossing time.
        k: exponent in v^k v_x.
    """

    def __init__(self, u0: Field, t: float, k: int, factor: int = UPSAMPLE, interp=None):
        self.solution = burgers_solution(u0, t, k)
        self.t = float(t)
        self.k = int(k)
        self.interp = interp if interp is not None else Interpolant(u0, factor)

    def on_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """(v, v_x) on the Eulerian grid; at t = 0 this is u0 and its spectral slope."""
        u0 = self.solution.u0
        if self.t == 0:
            return np.array(u0.values), rderivative(u0.values, u0.grid.half_length, 1)
        return self.evaluate(u0.grid.x)

    def preimage(self, x: np.ndarray, tol: float = 1e-14, max_iter: int = 50) -> np.ndarray:
        """Solve xi + t U(xi)^k = x for xi by safeguarded Newton iteration."""
        x = np.asarray(x, dtype=float)
        t, k, I = self.t, self.k, self.interp
        if t == 0:
            return x.copy()
        xi = x - t * I.value(x) ** k
        scale = max(1.0, self.interp.L)
        for _ in range(max_iter):
            U = I.value(xi)
            dU = I.slope(xi)
            F = xi + t * U**k - x
            dF = 1.0 + t * k * U ** (k - 1) * dU if k > 1 else 1.0 + t * dU
            if np.any(dF <= 0):
                raise BreakingError("flow map lost monotonicity during inversion", (math.nan, t))
            step = F / dF
            xi = xi - step
            if np.max(np.abs(step)) <= tol * scale:
                break
        else:
            raise RuntimeError("Newton inversion of the flow map did not converge")
        return xi

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (v, v_x) at the points x."""
        xi = self.preimage(x)
        U = self.interp.value(xi)
        dU = self.interp.slope(xi)
        k, t = self.k, self.t
        jac = 1.0 + t * k * U ** (k - 1) * dU if k > 1 else 1.0 + t * dU
        return U, dU / jac

    def sup(self) -> float:
        """Continuous sup |v(t, .)|, polished around the largest grid sample."""
        x = self.solution.u0.grid.x
        v, _ = self.evaluate(x)
        return _polish_sup(lambda s: self.evaluate(np.array([s]))[0][0], x, v)


def _polish_sup(func, x: np.ndarray, v: np.ndarray) -> float:
    i = int(np.argmax(np.abs(v)))
    sign = 1.0 if v[i] >= 0 else -1.0
    dx = x[1] - x[0]
    res = optimize.minimize_scalar(
        lambda s: -sign * func(s), bounds=(x[i] - dx, x[i] + dx), method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(abs(v[i]), -res.fun))


def continuous_sup(u0: Field, factor: int = UPSAMPLE) -> float:
    """sup |u0| of the spline interpolant, polished like :meth:`BurgersEvaluator.sup`."""
    interp = Interpolant(u0, factor)
    return _polish_sup(lambda s: float(interp.value(np.array([s]))[0]), u0.grid.x, u0.values)


def burgers_eval_with_slope(u0: Field, t: float, k: int) -> tuple[Field, Field]:
    """v(t) and v_x(t) on the Eulerian grid of u0."""
    v, vx = BurgersEvaluator(u0, t, k).on_grid()
    return Field(u0.grid, v), Field(u0.grid, vx)


def burgers_eval(u0: Field, t: float, k: int) -> Field:
    """v(t) on the Eulerian grid; raises BreakingError past the crossing time."""
    return burgers_eval_with_slope(u0, t, k)[0]


def window_T2(u0: Field, k: int) -> float:
    """T2 = min{1, 1/(2k ||u0||^(k-1) ||u0'||)}."""
    sup_u = float(np.max(np.abs(u0.values)))
    sup_ux = float(np.max(np.abs(rderivative(u0.values, u0.grid.half_length, 1))))
    denom = 2.0 * k * sup_u ** (k - 1) * sup_ux
    return 1.0 if denom == 0 else min(1.0, 1.0 / denom)


@dataclass(frozen=True)
class DerivativeBoundReport:
    t: float
    T2: float
    sup_slope: float
    initial_slope: float
    factor: float
    ok: bool


def derivative_bound_check(u0: Field, t: float, k: int) -> DerivativeBoundReport:
    """Check ||d_x v(t)|| <= 2 ||u0'|| for t <= T2, from the Lagrangian chain rule.

    Raises:
        PreconditionError: if t > T2.
    """
    T2 = window_T2(u0, k)
    if t < 0 or t > T2 * (1 + 1e-12):
        raise PreconditionError(f"t={t:.6g} outside [0, T2] with T2={T2:.6g}")
    ux = rderivative(u0.values, u0.grid.half_length, 1)
    jac = 1.0 + t * k * u0.values ** (k - 1) * ux if k > 1 else 1.0 + t * ux
    slope = ux / jac
    s0 = float(np.max(np.abs(ux)))
    s = float(np.max(np.abs(slope)))
    factor = s / s0 if s0 > 0 else 0.0
    return DerivativeBoundReport(float(t), T2, s, s0, factor, bool(s <= 2.0 * s0 * (1 + 1e-12)))


def first_order_residual(u0: Field, t: float, k: int) -> float:
    """||v(t) - u0 + t u0^k u0'||_{C1} on the Eulerian grid."""
    T2 = window_T2(u0, k)
    if not (0 < t <= T2 * (1 + 1e-12)):
        raise PreconditionError(f"t={t:.6g} outside (0, T2] with T2={T2:.6g}")
    L = u0.grid.half_length
    u = u0.values
    ux = rderivative(u, L, 1)
    uxx = rderivative(u, L, 2)
    lin = u**k * ux
    dlin = (k * u ** (k - 1) * ux * ux if k > 1 else ux * ux) + u**k * uxx
    v, vx = burgers_eval_with_slope(u0, t, k)
    return c1_parts(v.values - u + t * lin, vx.values - ux + t * dlin)


def approx_vs_actual_error(
    u0: Field, p: EquationParams, t: float, cfg: SolverConfig | None = None
) -> float:
    """||S^u_t(u0) - S^v_t(u0)||_{C1}: full equation against pure transport."""
    if p.k < 3:
        raise ValueError("approx_vs_actual_error is meant for k >= 3")
    if not (0 <= t <= 0.25):
        raise ValueError("t must lie in [0, 0.25]")
    if t == 0:
        return 0.0
    base = cfg or SolverConfig(t_final=t, cfl_number=1.0, dt_initial=1.0)
    run = SolverConfig(
        dt_initial=base.dt_initial,
        cfl_number=base.cfl_number,
        t_final=t,
        breaking_threshold=base.breaking_threshold,
        conservation_check_interval=base.conservation_check_interval,
    )
    trace = solve(u0, p, run)
    full = trace.final.values
    L = u0.grid.half_length
    v, vx = burgers_eval_with_slope(u0, t, p.k)
    return c1_parts(full - v.values, rderivative(full, L, 1) - vx.values)
