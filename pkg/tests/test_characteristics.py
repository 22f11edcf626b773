import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from gkbch.characteristics import (
    BreakingError,
    BurgersEvaluator,
    Interpolant,
    PreconditionError,
    approx_vs_actual_error,
    burgers_eval,
    burgers_eval_with_slope,
    burgers_flow,
    continuous_sup,
    crossing_time,
    derivative_bound_check,
    first_order_residual,
    window_T2,
)
from gkbch.dynamics import CH, EquationParams, SolverConfig, solve
from gkbch.spectral import Field, Grid


def wave(a=0.5, N=128):
    g = Grid(math.pi, N)
    return g.sample(lambda x: a * np.sin(x))


def gauss(a=0.6, N=512, L=20.0):
    g = Grid(L, N)
    return g.sample(lambda x: a * np.exp(-(x**2) / 2))


def test_constant_datum_is_stationary():
    g = Grid(3.0, 64)
    u0 = Field(g, np.full(64, 0.7))
    assert crossing_time(u0, 2) == math.inf
    v, vx = burgers_eval_with_slope(u0, 5.0, 2)
    assert np.max(np.abs(v.values - 0.7)) < 1e-14
    assert np.max(np.abs(vx.values)) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3])
def test_time_zero_is_identity(k):
    u0 = gauss()
    assert np.array_equal(burgers_eval(u0, 0.0, k).values, u0.values)
    assert np.array_equal(burgers_flow(u0, 0.0, k).departure_points, u0.grid.x)
    assert np.array_equal(BurgersEvaluator(u0, 0.0, k).preimage(u0.grid.x), u0.grid.x)


def test_crossing_time_of_sine():
    # min u0' = -a at x = 0 for u0 = a sin x
    assert crossing_time(wave(0.5), 1) == pytest.approx(2.0, rel=1e-13)


@pytest.mark.parametrize("k", [2, 3])
def test_crossing_time_against_dense_scan(k):
    u0 = gauss(N=1024)
    s = np.linspace(-20, 20, 400001)
    rate = k * (0.6 * np.exp(-(s**2) / 2)) ** (k - 1) * (-0.6 * s * np.exp(-(s**2) / 2))
    # the grid minimum misses the true one by O(dx^2)
    assert crossing_time(u0, k) == pytest.approx(-1.0 / rate.min(), rel=1e-3)


def test_breaking_error_brackets_crossing():
    u0 = wave(0.5)
    with pytest.raises(BreakingError) as exc:
        burgers_flow(u0, 2.5, 1)
    lo, hi = exc.value.bracket
    assert lo == pytest.approx(2.0) and lo <= hi <= 2.5
    burgers_flow(u0, 1.9, 1)
    with pytest.raises(ValueError):
        burgers_flow(u0, -0.1, 1)


@pytest.mark.parametrize("t", [0.3, 1.0, 1.8])
def test_implicit_solution_of_sine(t):
    # v = a sin(x - t v), solved pointwise by bracketing
    a = 0.5
    u0 = wave(a)
    v = burgers_eval(u0, t, 1).values
    for i in range(0, 128, 9):
        x = u0.grid.x[i]
        ref = brentq(lambda w: w - a * math.sin(x - t * w), -a - 1e-9, a + 1e-9, xtol=1e-15, rtol=1e-15)
        assert v[i] == pytest.approx(ref, abs=1e-12)


def test_chain_rule_slope_of_sine():
    a, t = 0.5, 1.0
    u0 = wave(a)
    v, vx = burgers_eval_with_slope(u0, t, 1)
    xi = u0.grid.x - t * v.values
    ref = a * np.cos(xi) / (1 + t * a * np.cos(xi))
    assert np.max(np.abs(vx.values - ref)) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.9), st.sampled_from([1, 2, 3]))
def test_sup_is_transported(frac, k):
    u0 = gauss()
    t = frac * crossing_time(u0, k)
    assert BurgersEvaluator(u0, t, k).sup() == pytest.approx(continuous_sup(u0), abs=1e-12)


def test_interpolant_reproduces_samples():
    u0 = gauss(N=256)
    I = Interpolant(u0)
    assert np.max(np.abs(I.value(u0.grid.x) - u0.values)) < 1e-14
    off = u0.grid.x + 0.37 * u0.grid.spacing
    assert np.max(np.abs(I.value(off) - 0.6 * np.exp(-(off**2) / 2))) < 1e-12
    assert I.value(np.array([20.0 + 0.1]))[0] == pytest.approx(I.value(np.array([-20.0 + 0.1]))[0])


@pytest.mark.parametrize("k", [1, 3])
def test_agrees_with_transport_pde_solve(k):
    # the pseudo-spectral run converges spectrally in N; 2048 points reach round-off level
    u0 = gauss(N=2048)
    t = 0.25 * crossing_time(u0, k)
    tr = solve(u0, EquationParams(k, k + 1), SolverConfig(t_final=t, dt_initial=1.0, cfl_number=0.25),
               include_nonlocal=False)
    v = burgers_eval(u0, t, k)
    assert np.max(np.abs(tr.final.values - v.values)) < 1e-10


def test_window_T2():
    u0 = wave(0.5)
    assert window_T2(u0, 1) == 1.0
    assert window_T2(wave(2.0), 3) == pytest.approx(1.0 / (2 * 3 * 2.0**2 * 2.0))
    assert window_T2(Field(u0.grid, np.zeros(128)), 3) == 1.0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_derivative_bound_holds_up_to_T2(k):
    u0 = gauss(a=1.5)
    T2 = window_T2(u0, k)
    for t in (0.0, 0.5 * T2, T2):
        r = derivative_bound_check(u0, t, k)
        assert r.ok and r.factor <= 2.0
    with pytest.raises(PreconditionError):
        derivative_bound_check(u0, 1.01 * T2, k)


def test_first_order_residual_is_quadratic():
    u0 = gauss(a=1.0)
    T2 = window_T2(u0, 3)
    r1 = first_order_residual(u0, T2 / 2, 3)
    r2 = first_order_residual(u0, T2 / 4, 3)
    assert 3.5 <= r1 / r2 <= 4.5
    with pytest.raises(PreconditionError):
        first_order_residual(u0, 0.0, 3)


def test_approx_vs_actual_error():
    u0 = gauss(a=0.6, N=512)
    p = EquationParams(3, 4.0)
    assert approx_vs_actual_error(u0, p, 0.0) == 0.0
    e1 = approx_vs_actual_error(u0, p, 0.05)
    e2 = approx_vs_actual_error(u0, p, 0.1)
    assert 0 < e1 < e2
    with pytest.raises(ValueError):
        approx_vs_actual_error(u0, CH, 0.1)
    with pytest.raises(ValueError):
        approx_vs_actual_error(u0, p, 0.3)
