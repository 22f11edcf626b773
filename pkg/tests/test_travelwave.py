import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkbch.travelwave import (
    DELTA_MAX,
    delta_for_period,
    divergence_check,
    half_period,
    half_period_quadrature,
    period_range,
    solve_wave_ode,
    traveling_pair,
)


@pytest.mark.parametrize("delta", [0.0, -0.1, DELTA_MAX, 0.3])
def test_delta_outside_range_rejected(delta):
    with pytest.raises(ValueError):
        solve_wave_ode(delta)
    with pytest.raises(ValueError):
        half_period_quadrature(delta)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.002, 0.195))
def test_half_period_ode_matches_quadrature(delta):
    assert half_period(delta) == pytest.approx(half_period_quadrature(delta), rel=1e-10)


def test_half_period_increases_with_delta():
    ds = [0.01, 0.05, 0.1, 0.15, 0.19]
    ells = [half_period(d) for d in ds]
    assert all(a < b for a, b in zip(ells, ells[1:]))
    lo, hi = period_range()
    assert lo < ells[0] and ells[-1] < hi


@pytest.mark.parametrize("delta", [0.01, 0.05, 0.1, 0.19])
def test_profile_properties(delta):
    w = solve_wave_ode(delta)
    b = w.bounds()
    assert all(c["ok"] for c in b.values()), b
    assert w.is_even()
    assert w.max_energy_residual < 1e-10
    assert w.y_samples.values[w.y_samples.grid.points // 2] == pytest.approx(delta, rel=1e-12)
    assert w.evaluate(np.array([0.0]), 2)[0] == pytest.approx(w.second_derivative_at_min, rel=1e-8)
    assert w.evaluate(np.array([w.half_period * (1 - 1e-12)]))[0] == pytest.approx(delta + delta**2, rel=1e-10)


def test_profile_solves_ode_between_samples():
    delta = 0.1
    w = solve_wave_ode(delta)
    a, c = delta + delta**2, 2 - 2 * delta - delta**2
    K = delta * a * c
    x = np.linspace(-w.half_period, w.half_period, 333)
    y, y2 = w.evaluate(x), w.evaluate(x, 2)
    assert np.max(np.abs(y2 - (y - 1 + K / (2 * y**2)))) < 1e-9


@pytest.mark.parametrize("n", [3, 4, 8, 12])
def test_delta_for_period(n):
    d = delta_for_period(n)
    assert abs(half_period(d) - math.pi / n) <= 1e-10
    assert 0 < d < DELTA_MAX


def test_delta_for_period_errors():
    with pytest.raises(ValueError, match="outside attainable"):
        delta_for_period(2)
    with pytest.raises(ValueError):
        delta_for_period(0)


def test_pair_initial_distance_and_residual():
    pair = traveling_pair(6)
    f = pair.wave.f_samples
    fp = -pair.wave.evaluate(f.grid.x, 1)
    expected = (np.max(np.abs(f.values)) + np.max(np.abs(fp))) / 6
    assert pair.c1_distance(0.0) == pytest.approx(expected, rel=1e-6)
    assert pair.speed == pytest.approx(7 / 6)
    assert pair.ch_residual() < 1e-9
    # u1 is 2 pi periodic: n copies of the profile fill the circle
    x = np.linspace(-math.pi, math.pi, 50)
    assert np.max(np.abs(pair.u1(x, 0.3) - pair.u1(x + 2 * math.pi, 0.3))) < 1e-12


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_divergence_lower_bound(t):
    r = divergence_check(8, t)
    assert r.ok
    assert r.lhs_c1 >= r.rhs - r.remainder


def test_divergence_window():
    pair = traveling_pair(8)
    with pytest.raises(ValueError):
        divergence_check(8, 8 * pair.wave.half_period, pair)
    assert divergence_check(8, 0.0, pair).ok


def test_profile_csv():
    lines = solve_wave_ode(0.05, points=32).to_csv().splitlines()
    assert lines[0] == "x,y,y_prime,f"
    assert len(lines) == 33
