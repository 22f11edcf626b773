import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from gkbch.initdata import (
    HIGH_K,
    LOW_K,
    STD_PER_WIDTH,
    BumpSpec,
    DataRegime,
    build_bump,
    check_pair_bounds,
    make_pair,
    make_peakon,
    smooth_step,
    smoothed_kink,
)
from gkbch.spectral import Grid, ResolutionError

from conftest import PHI0_LINE, ref_bump_hat, ref_phi0_periodic, ref_step

# phi(0) of the periodized bump, from the dual-lattice sum (frozen)
PHI0_L50 = 0.119341418362534
PHI0_L25 = 0.11936289602668179


def lattice_value(fhat, L, x, M):
    """(1/2L) sum_m fhat(pi m / L) exp(i pi m x / L), summed directly."""
    m = np.arange(-M, M + 1)
    xi = np.pi * m / L
    return float(np.real(np.sum(fhat(xi) * np.exp(1j * xi * x))) / (2 * L))


# --- bump -------------------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.floats(-2.0, 3.0, allow_nan=False))
def test_smooth_step_matches_reference(s):
    assert smooth_step(np.array([s]))[0] == pytest.approx(ref_step(np.array([s]))[0], abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0))
def test_smooth_step_symmetry(s):
    a = smooth_step(np.array([s, 1.0 - s]))
    assert a[0] + a[1] == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(-2.0, 2.0, allow_nan=False))
def test_bump_transform_profile(xi):
    v = BumpSpec().transform(np.array([xi]))[0]
    assert v == pytest.approx(ref_bump_hat(np.array([xi]))[0], abs=1e-15)
    assert 0.0 <= v <= 1.0
    if abs(xi) <= 0.25:
        assert v == 1.0
    if abs(xi) >= 0.5:
        assert v == 0.0


def test_bump_spec_validation():
    with pytest.raises(ValueError):
        BumpSpec(0.5, 0.25)
    with pytest.raises(ValueError):
        BumpSpec(transition="cosine")


def test_peak_value_on_line():
    # symmetry of the step gives integral phi_hat = 3/4, so phi(0) = 3/(8 pi)
    assert BumpSpec().peak_value_line() == pytest.approx(PHI0_LINE, rel=1e-13)


@pytest.mark.parametrize("L,frozen", [(50.0, PHI0_L50), (25.0, PHI0_L25)])
def test_periodic_peak_value(L, frozen):
    b = build_bump(BumpSpec(), Grid(L, 1024))
    assert b.phi0 == pytest.approx(ref_phi0_periodic(L), rel=1e-14)
    assert b.phi0 == pytest.approx(frozen, rel=1e-14)
    # the FFT-sampled field peaks at the origin with the same value
    i0 = int(np.argmin(np.abs(b.field.grid.x)))
    assert b.field.values[i0] == pytest.approx(b.phi0, rel=1e-13)
    assert np.argmax(b.field.values) == i0
    assert b.phi0_line == pytest.approx(PHI0_LINE, rel=1e-13)


def test_bump_is_even_and_tail_measured():
    b = build_bump(BumpSpec(), Grid(50.0, 1024))
    v = b.field.values
    assert np.max(np.abs(v[1:] - v[1:][::-1])) < 1e-15
    assert 5e-3 < b.tail < 8e-3


def test_bump_field_matches_direct_lattice_sum():
    g = Grid(25.0, 256)
    b = build_bump(BumpSpec(), g)
    for i in (0, 37, 128, 200):
        assert b.field.values[i] == pytest.approx(lattice_value(ref_bump_hat, 25.0, g.x[i], 8), abs=1e-15)


def test_bump_rejects_short_box_and_heavy_tail():
    with pytest.raises(ResolutionError, match="too short"):
        build_bump(BumpSpec(), Grid(10.0, 256))
    with pytest.raises(ResolutionError, match="tail"):
        build_bump(BumpSpec(), Grid(50.0, 1024), tail_tol=1e-3)
    with pytest.raises(ResolutionError, match="Nyquist"):
        build_bump(BumpSpec(), Grid(100.0, 16))


# --- regimes and pairs ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "kw",
    [
        {"kind": "mid", "n": 1, "k": 3},
        {"kind": HIGH_K, "n": 0, "k": 3},
        {"kind": HIGH_K, "n": 2, "k": 2},
        {"kind": LOW_K, "n": 2, "k": 3},
        {"kind": LOW_K, "n": 2, "k": 1, "lam": 0.5},
    ],
)
def test_regime_validation(kw):
    with pytest.raises(ValueError):
        DataRegime(**kw)


@pytest.mark.parametrize("kind,k,n,L", [(HIGH_K, 3, 6, 50.0), (LOW_K, 1, 3, 25.0), (LOW_K, 2, 1, 25.0)])
def test_grid_rule(kind, k, n, L):
    reg = DataRegime(kind, n, k)
    g = reg.grid_for(L)
    assert g.points >= 8 * reg.carrier * L / math.pi
    assert g.points & (g.points - 1) == 0
    assert g.points // 2 < 8 * reg.carrier * L / math.pi
    with pytest.raises(ResolutionError, match="need N"):
        make_pair(reg, Grid(L, g.points // 2))


def test_high_frequency_pair_matches_lattice_sum():
    reg = DataRegime(HIGH_K, 3, 3)
    g = reg.grid_for(50.0)
    pair = make_pair(reg, g)
    fhat = lambda xi: 2.0**-3 * 0.5 * (ref_bump_hat(xi - 8) + ref_bump_hat(xi + 8))
    M = int(9 * 50 / math.pi) + 2
    for i in (0, g.points // 2, g.points // 2 + 5, 3 * g.points // 4):
        assert pair.f.values[i] == pytest.approx(lattice_value(fhat, 50.0, g.x[i], M), abs=1e-15)
    assert np.max(np.abs(pair.g.values - 2.0 ** (-1.0) * pair.bump.field.values)) == 0.0
    assert np.array_equal(pair.sum.values, pair.f.values + pair.g.values)


def test_low_frequency_pair_matches_lattice_sum():
    reg = DataRegime(LOW_K, 2, 1, lam=4)
    g = reg.grid_for(25.0)
    pair = make_pair(reg, g)
    fhat = lambda xi: 2.0**-4 * 0.5 * (ref_bump_hat((xi - 16) / 4) + ref_bump_hat((xi + 16) / 4))
    M = int(18 * 25 / math.pi) + 2
    for i in (0, g.points // 2, g.points // 2 + 3, 3 * g.points // 4):
        assert pair.f.values[i] == pytest.approx(lattice_value(fhat, 25.0, g.x[i], M), abs=1e-15)


def test_high_frequency_pair_shape_near_origin():
    # away from the tails f_n is 2^-n phi cos(2^n x) up to periodization effects
    reg = DataRegime(HIGH_K, 4, 3)
    pair = make_pair(reg, reg.grid_for(50.0))
    x = pair.f.grid.x
    near = np.abs(x) < 5
    approx = 2.0**-4 * pair.bump.field.values * np.cos(16 * x)
    assert np.max(np.abs(pair.f.values[near] - approx[near])) < 1e-3 * 2.0**-4 * pair.bump.phi0


@pytest.mark.parametrize("n", [3, 5])
def test_high_frequency_bounds(n):
    reg = DataRegime(HIGH_K, n, 3)
    b = check_pair_bounds(make_pair(reg, reg.grid_for(50.0)))
    assert b.ok, b.checks
    assert set(b.checks) == {"g_c2", "f_linf", "f_slope", "f_curv", "leading_term"}


@pytest.mark.parametrize("k,n", [(1, 1), (1, 2), (2, 1)])
def test_low_frequency_bounds(k, n):
    reg = DataRegime(LOW_K, n, k)
    b = check_pair_bounds(make_pair(reg, reg.grid_for(25.0)))
    assert b.ok, b.checks
    assert b.checks["g_h1_identity"]["ok"]


# --- peakons ----------------------------------------------------------------------------------


def test_raw_peakon():
    g = Grid(20.0, 512)
    u = make_peakon(8.0, 3, 0.0, 0.0, g)
    assert np.max(np.abs(u.values - 2.0 * np.exp(-np.abs(g.x)))) < 1e-15


def test_peakon_center_uses_periodic_distance():
    g = Grid(10.0, 256)
    u = make_peakon(1.0, 1, 9.5, 0.0, g)
    assert u.values[0] == pytest.approx(math.exp(-0.5))
    with pytest.raises(ValueError):
        make_peakon(1.0, 1, 10.0, 0.0, g)
    with pytest.raises(ValueError):
        make_peakon(-1.0, 1, 0.0, 0.0, g)
    with pytest.raises(ValueError):
        make_peakon(1.0, 1, 0.0, -0.1, g)


@pytest.mark.parametrize("x", [-3.0, -0.2, 0.0, 0.05, 0.7, 4.0])
def test_smoothed_kink_matches_convolution_quadrature(x):
    s = 0.3
    gauss = lambda y: math.exp(-(y**2) / (2 * s**2)) / (s * math.sqrt(2 * math.pi))
    ref = quad(lambda y: math.exp(-abs(x - y)) * gauss(y), -12 * s, 12 * s, points=[x], epsabs=1e-15)[0]
    assert smoothed_kink(np.array([x]), s)[0] == pytest.approx(ref, abs=1e-13)


def test_smoothed_kink_far_field_is_finite():
    v = smoothed_kink(np.array([-800.0, 800.0, 0.0]), 1e-3)
    assert np.all(np.isfinite(v))
    assert v[2] == pytest.approx(1.0, abs=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.5))
def test_mollified_peakon_sup_difference(scale):
    g = Grid(20.0, 4096)
    raw = make_peakon(1.0, 1, 0.0, 0.0, g)
    mol = make_peakon(1.0, 1, 0.0, scale, g)
    diff = np.max(np.abs(raw.values - mol.values))
    # the crest drop is sqrt(2/pi) * sigma to leading order
    assert diff <= 0.2 * scale
    assert diff == pytest.approx(math.sqrt(2 / math.pi) * STD_PER_WIDTH * scale, rel=0.1)


def test_normalized_crest():
    g = Grid(20.0, 1024)
    u = make_peakon(4.0, 2, 0.0, 4 * g.spacing, g, normalize_crest=True)
    assert u.sup() == pytest.approx(2.0, rel=1e-14)
