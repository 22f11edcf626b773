"""
Smooth periodic traveling waves of the Camassa-Holm equation on the circle.

With K = delta (delta + delta^2)(2 - 2 delta - delta^2) the profile solves

    y'' = y - 1 + K / (2 y^2),   y(0) = delta,   y'(0) = 0,

and oscillates between delta and delta + delta^2 with half period ell (the
distance from the minimum to the maximum). Its first integral is

    (y')^2 = (a - y)(y - delta)(c - y) / y,   a = delta + delta^2,  c = 2 - 2 delta - delta^2.

Choosing delta so that ell = pi/n makes f_n = 1 - y_n 2pi-periodic, and
u1(x, t) = f_n(x - t), u2(x, t) = c_n f_n(x - c_n t) with c_n = 1 + 1/n are two
exact solutions that start close and separate at a rate independent of n.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .dynamics import CH, rhs
from .spectral import Field, Grid

DELTA_MAX = 0.2
ODE_RTOL = 1e-13
ODE_ATOL = 1e-16


def _constants(delta: float) -> tuple[float, float, float]:
    a = delta + delta**2
    c = 2.0 - 2.0 * delta - delta**2
    K = delta * a * c
    return a, c, K


def _check_delta(delta: float) -> None:
    if not (0.0 < delta < DELTA_MAX):
        raise ValueError(f"delta must lie in (0, 1/5), got {delta}")


@dataclass(frozen=True)
class TravelWave:
    """One period of the profile y on a uniform grid over [-ell, ell).

    ``coefficients`` are the rfft coefficients of the samples (which start at
    x = -ell), used to evaluate y and its derivatives anywhere by
    trigonometric interpolation.
    """

    delta: float
    y_samples: Field
    half_period: float
    sup_y3: float
    max_energy_residual: float
    coefficients: np.ndarray

    @property
    def f_samples(self) -> Field:
        return Field(self.y_samples.grid, 1.0 - self.y_samples.values)

    @property
    def second_derivative_at_min(self) -> float:
        d = self.delta
        return d * (2.0 - 3.0 * d - d * d) / 2.0

    def evaluate(self, x, order: int = 0) -> np.ndarray:
        """y^(order)(x) at arbitrary points, by the trigonometric interpolant."""
        x = np.asarray(x, dtype=float)
        c = self.coefficients
        M = self.y_samples.grid.points
        ell = self.half_period
        m = np.arange(c.size)
        kx = np.pi * m / ell
        w = np.full(c.size, 2.0)
        w[0] = 1.0
        w[-1] = 1.0 if M % 2 == 0 else 2.0
        amp = w * c * (1j * kx) ** order / M
        if order % 2 and M % 2 == 0:
            amp[-1] = 0.0
        s = np.mod(np.ravel(x) + ell, 2.0 * ell)
        out = np.empty(s.size)
        step = max(1, 2_000_000 // c.size)
        for i in range(0, s.size, step):
            ph = np.exp(1j * np.outer(s[i : i + step], kx))
            out[i : i + step] = (ph @ amp).real
        return out.reshape(x.shape)

    def c1_norm(self) -> float:
        """||y||_{C1} of the profile (the same on the circle after tiling)."""
        x = self.y_samples.grid.x
        return float(np.max(np.abs(self.y_samples.values)) + np.max(np.abs(self.evaluate(x, 1))))

    def bounds(self) -> dict:
        """Pointwise, derivative and period bounds, each with a pass flag."""
        d = self.delta
        a = d + d * d
        y = self.y_samples.values
        yp = self.evaluate(self.y_samples.grid.x, 1)
        lo, hi = math.sqrt(2.0) / 6.0 * math.sqrt(a), 4.0 * math.sqrt(a)
        tol = 1e-12
        return {
            "range": {
                "ok": bool(np.min(y) >= d - tol and np.max(y) <= a + tol),
                "min": float(np.min(y)),
                "max": float(np.max(y)),
            },
            "slope": {
                "ok": bool(np.max(np.abs(yp)) <= math.sqrt(2.0) * d**1.5),
                "max": float(np.max(np.abs(yp))),
                "bound": math.sqrt(2.0) * d**1.5,
            },
            "period": {"ok": lo <= self.half_period <= hi, "value": self.half_period, "bracket": [lo, hi]},
        }

    def is_even(self, tol: float = 1e-10) -> bool:
        y = self.y_samples.values
        # grid is symmetric about 0 except for the node at -ell
        return bool(np.max(np.abs(y[1:] - y[1:][::-1])) <= tol)

    def to_csv(self) -> str:
        x = self.y_samples.grid.x
        y = self.y_samples.values
        yp = self.evaluate(x, 1)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "y_prime", "f"])
        for row in zip(x, y, yp, 1.0 - y):
            w.writerow([format(float(v), ".17g") for v in row])
        return buf.getvalue()


def _rhs_ode(K):
    def f(x, z):
        y, yp = z
        return [yp, y - 1.0 + K / (2.0 * y * y)]

    return f


def _half_period_ode(delta: float):
    _check_delta(delta)
    a, c, K = _constants(delta)

    def top(x, z):
        return z[1]

    top.terminal = True
    top.direction = -1
    span = 10.0 * 4.0 * math.sqrt(a)
    sol = integrate.solve_ivp(
        _rhs_ode(K),
        (0.0, span),
        [delta, 0.0],
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        events=top,
        dense_output=True,
    )
    if sol.t_events[0].size == 0:
        raise RuntimeError(f"no turning point found within x <= {span:.4g} for delta={delta}")
    return float(sol.t_events[0][0]), sol.sol


def half_period_quadrature(delta: float) -> float:
    """ell from the first integral, with y = delta + delta^2 (1 - cos s)/2.

    The substitution removes both endpoint singularities: dx = sqrt(y / (c - y)) ds
    for s in [0, pi].
    """
    _check_delta(delta)
    d = delta
    c = 2.0 - 2.0 * d - d * d

    def integrand(s):
        y = d + d * d * (1.0 - math.cos(s)) / 2.0
        return math.sqrt(y / (c - y))

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def solve_wave_ode(delta: float, points: int = 256) -> TravelWave:
    """Integrate the profile ODE over a half period and resample one full period.

    Raises:
        ValueError: delta outside (0, 1/5).
        RuntimeError: turning point not found within 10 * 4 sqrt(delta + delta^2).
    """
    ell, dense = _half_period_ode(delta)
    grid = Grid(ell, points)
    x = grid.x
    # y is even: sample |x| on [0, ell]
    z = dense(np.abs(x))
    y = z[0]
    yp = np.sign(x) * z[1]
    a, c, K = _constants(delta)
    # energy residual of the first integral, measured inside the half period
    interior = (np.abs(x) > 0.05 * ell) & (np.abs(x) < 0.95 * ell)
    energy = yp**2 - (a - y) * (y - delta) * (c - y) / y
    resid = float(np.max(np.abs(energy[interior]))) if np.any(interior) else 0.0
    y3 = yp * (1.0 - K / y**3)
    xs = np.linspace(0.0, ell, 4097)
    zz = dense(xs)
    sup_y3 = float(max(np.max(np.abs(y3)), np.max(np.abs(zz[1] * (1.0 - K / zz[0] ** 3)))))
    coeffs = np.fft.rfft(y)
    coeffs.setflags(write=False)
    return TravelWave(delta, Field(grid, y), ell, sup_y3, resid, coeffs)


def half_period(delta: float) -> float:
    return _half_period_ode(delta)[0]


def period_range(delta_lo: float = 1e-6, delta_hi: float = DELTA_MAX - 1e-9) -> tuple[float, float]:
    return half_period(delta_lo), half_period(delta_hi)


def delta_for_period(n: int, tol: float = 1e-10) -> float:
    """delta with ell(delta) = pi/n, by bracketing root search.

    Raises:
        ValueError: if pi/n lies outside the attainable range of ell.
    """
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    return _delta_for_period(int(n), tol)


@lru_cache(maxsize=64)
def _delta_for_period(n: int, tol: float) -> float:
    target = math.pi / n
    lo_d, hi_d = 1e-6, DELTA_MAX - 1e-9
    lo, hi = half_period(lo_d), half_period(hi_d)
    if not (lo < target < hi):
        raise ValueError(f"half period pi/{n}={target:.6g} outside attainable range [{lo:.6g}, {hi:.6g}]")
    root = optimize.brentq(lambda d: half_period(d) - target, lo_d, hi_d, xtol=1e-15, rtol=1e-15, maxiter=200)
    err = abs(half_period(root) - target)
    if err > tol:
        raise RuntimeError(f"period match failed: |ell - pi/n| = {err:.2e}")
    return float(root)


@dataclass(frozen=True)
class TravelingPair:
    """u1(x, t) = f(x - t) and u2(x, t) = c_n f(x - c_n t) on the circle [-pi, pi)."""

    n: int
    wave: TravelWave

    @property
    def speed(self) -> float:
        return 1.0 + 1.0 / self.n

    def u1(self, x, t: float, order: int = 0) -> np.ndarray:
        return _f(self.wave, np.asarray(x) - t, order)

    def u2(self, x, t: float, order: int = 0) -> np.ndarray:
        c = self.speed
        return c * _f(self.wave, np.asarray(x) - c * t, order)

    def c1_distance(self, t: float, points: int = 4096) -> float:
        x = Grid(math.pi, points).x
        d0 = self.u1(x, t) - self.u2(x, t)
        d1 = self.u1(x, t, 1) - self.u2(x, t, 1)
        return float(np.max(np.abs(d0)) + np.max(np.abs(d1)))

    def c1_norms(self, t: float, points: int = 4096) -> tuple[float, float]:
        x = Grid(math.pi, points).x
        n1 = np.max(np.abs(self.u1(x, t))) + np.max(np.abs(self.u1(x, t, 1)))
        n2 = np.max(np.abs(self.u2(x, t))) + np.max(np.abs(self.u2(x, t, 1)))
        return float(n1), float(n2)

    def ch_residual(self, points: int = 1024) -> float:
        """sup |u_t + u u_x - P(u)| for u1 at t = 0, with u_t = -f' exactly."""
        g = Grid(math.pi, points)
        u = Field(g, self.u1(g.x, 0.0))
        ut = -self.u1(g.x, 0.0, 1)
        return float(np.max(np.abs(ut - rhs(u, CH).values)))


def _f(wave: TravelWave, x, order: int) -> np.ndarray:
    y = wave.evaluate(x, order)
    return 1.0 - y if order == 0 else -y


def traveling_pair(n: int, points: int = 256) -> TravelingPair:
    return TravelingPair(int(n), solve_wave_ode(delta_for_period(n), points))


@dataclass(frozen=True)
class DivergenceReport:
    n: int
    t: float
    delta: float
    lhs_c1: float
    lhs_point: float
    rhs: float
    remainder: float
    ratio: float
    ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def divergence_check(n: int, t: float, pair: TravelingPair | None = None) -> DivergenceReport:
    """Compare ||u1(t) - u2(t)||_{C1} with delta^2 (2 - 3 delta - delta^2) t / (6 pi).

    The point value |y'(t/n)| is the derivative gap at x = c_n t. The Taylor
    remainder max|y'''| (t/n)^2 / 2 is subtracted from the lower bound.

    Raises:
        ValueError: if t < 0 or t/n > ell/2.
    """
    pair = pair or traveling_pair(n)
    w = pair.wave
    if t < 0 or t / n > w.half_period / 2.0:
        raise ValueError(f"t/n={t / n:.4g} outside [0, ell/2] with ell={w.half_period:.4g}")
    d = w.delta
    rhs_val = d * d * (2.0 - 3.0 * d - d * d) * t / (6.0 * math.pi)
    if t == 0:
        return DivergenceReport(n, 0.0, d, pair.c1_distance(0.0), 0.0, 0.0, 0.0, math.inf, True)
    lhs_point = float(abs(w.evaluate(np.array([t / n]), 1)[0]))
    lhs = pair.c1_distance(t)
    rem = w.sup_y3 * (t / n) ** 2 / 2.0
    ok = lhs >= lhs_point * (1 - 1e-12) and lhs_point >= rhs_val - rem
    return DivergenceReport(n, float(t), d, lhs, lhs_point, rhs_val, rem, lhs / rhs_val, bool(ok))
