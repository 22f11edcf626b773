"""
Initial data: the Fourier bump phi, the high/low-frequency pairs (f_n, g_n),
and (mollified) peakons.

Every smooth datum here is defined through its Fourier transform and sampled
by an inverse FFT, so on the periodic box we get exactly the periodization
sum_m u(x + 2Lm) of the line function, band-limited by construction. The
bump is not compactly supported in x (its transform is), and its tails decay
slowly and oscillate; near the edge of a box of half-length 50, |phi|/phi(0)
still reaches about 6e-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .norms import h1_parts
from .spectral import Field, Grid, ResolutionError, rderivative

HIGH_K = "high_k"
LOW_K = "low_k"

TRANSITIONS = ("exp_partition",)


def smooth_step(s: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, e^{-1/s}/(e^{-1/s}+e^{-1/(1-s)}) between."""
    s = np.asarray(s, dtype=float)
    out = np.where(s >= 1.0, 1.0, 0.0)
    inner = (s > 0.0) & (s < 1.0)
    si = s[inner]
    with np.errstate(over="ignore"):
        # 1/s overflows for subnormal s; exp(-inf) = 0 is the right limit
        a = np.exp(-1.0 / si)
        b = np.exp(-1.0 / (1.0 - si))
    out[inner] = a / (a + b)
    return out


@dataclass(frozen=True)
class BumpSpec:
    inner_radius: float = 0.25
    outer_radius: float = 0.5
    transition: str = "exp_partition"

    def __post_init__(self):
        if not (0 < self.inner_radius < self.outer_radius):
            raise ValueError("need 0 < inner_radius < outer_radius")
        if self.transition not in TRANSITIONS:
            raise ValueError(f"unknown transition {self.transition!r}; choose from {TRANSITIONS}")

    def transform(self, xi) -> np.ndarray:
        """phi_hat(xi): 1 on |xi| <= inner, 0 on |xi| >= outer, smooth and even."""
        a = np.abs(np.asarray(xi, dtype=float))
        w = self.outer_radius - self.inner_radius
        return 1.0 - smooth_step((a - self.inner_radius) / w)

    def peak_value_line(self) -> float:
        """phi(0) on the line, (1/2pi) * integral of phi_hat, by adaptive quadrature."""
        f = lambda s: float(self.transform(np.array([s]))[0])
        val, _ = integrate.quad(
            f, 0.0, self.outer_radius, points=[self.inner_radius], epsabs=1e-15, epsrel=1e-13, limit=200
        )
        return 2.0 * val / (2.0 * math.pi)


@dataclass(frozen=True)
class Bump:
    """The bump sampled on a grid, with its certified peak value.

    ``phi0`` is the peak of the periodic field, computed by direct trapezoidal
    summation of phi_hat over the dual lattice pi*m/L (no FFT involved).
    ``phi0_line`` is the line value from adaptive quadrature; the two differ by
    the periodization tail, i.e. by sum over m != 0 of phi(2Lm).
    """

    spec: BumpSpec
    field: Field
    phi0: float
    phi0_line: float
    tail: float

    def derivative_sups(self, orders=(0, 1, 2, 3)) -> dict:
        out = {}
        L = self.field.grid.half_length
        for j in orders:
            vals = self.field.values if j == 0 else rderivative(self.field.values, L, j)
            out[j] = float(np.max(np.abs(vals)))
        return out


def _from_transform(grid: Grid, fhat) -> np.ndarray:
    """Samples of the periodic function whose continuous transform is fhat (real, even)."""
    N = grid.points
    m = np.arange(N // 2 + 1)
    xi = np.pi * m / grid.half_length
    c = np.asarray(fhat(xi), dtype=float)
    if c[-1] != 0.0:
        raise ResolutionError("datum is not band-limited below the Nyquist mode")
    phase = np.where(m % 2 == 0, 1.0, -1.0)
    return np.fft.irfft(c * phase, n=N) / grid.spacing


def build_bump(spec: BumpSpec, grid: Grid, tail_tol: float = 0.1) -> Bump:
    """Sample phi on the grid and certify phi(0).

    Raises:
        ResolutionError: if max |phi| / phi(0) over the outer tenth of the box
            exceeds ``tail_tol``, or the dual lattice is too coarse to sample
            the transition of phi_hat.
    """
    return _build_bump_cached(spec, grid, float(tail_tol))


@lru_cache(maxsize=16)
def _build_bump_cached(spec: BumpSpec, grid: Grid, tail_tol: float) -> Bump:
    dxi = math.pi / grid.half_length
    width = spec.outer_radius - spec.inner_radius
    if dxi > width:
        raise ResolutionError(
            f"box half-length {grid.half_length} too short: dual spacing {dxi:.3g} "
            f"does not resolve the transition width {width:.3g} of phi_hat"
        )
    if math.pi * (grid.points // 2) / grid.half_length <= spec.outer_radius:
        raise ResolutionError("grid Nyquist wavenumber does not cover the bump support")
    vals = _from_transform(grid, spec.transform)
    # direct trapezoidal sum over the dual lattice, independent of the FFT path
    M = int(math.ceil(spec.outer_radius / dxi)) + 1
    lattice = dxi * np.arange(-M, M + 1)
    phi0 = float(np.sum(spec.transform(lattice)) / (2.0 * grid.half_length))
    outer = np.abs(grid.x) >= 0.9 * grid.half_length
    tail = float(np.max(np.abs(vals[outer])) / phi0)
    if tail > tail_tol:
        raise ResolutionError(
            f"bump tail max|phi| / phi(0) over |x| >= 0.9L is {tail:.2e}, above {tail_tol:.1e}; "
            "enlarge the box"
        )
    return Bump(spec, Field(grid, vals), phi0, spec.peak_value_line(), tail)


@dataclass(frozen=True)
class DataRegime:
    """Which pair of sequences to build.

    high_k: f_n = 2^-n phi(x) cos(2^n x), g_n = 2^(-n/k) phi(x), needs k >= 3.
    low_k:  f_n = 2^-n phi(2^n x) cos(lambda 2^n x), g_n = 2^-n phi(x), k in {1, 2}.
    """

    kind: str
    n: int
    k: int
    lam: float = 32.0

    def __post_init__(self):
        if self.kind not in (HIGH_K, LOW_K):
            raise ValueError(f"regime kind must be {HIGH_K!r} or {LOW_K!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.kind == HIGH_K and self.k < 3:
            raise ValueError(f"high_k regime requires k >= 3 (got k={self.k})")
        if self.kind == LOW_K:
            if self.k not in (1, 2):
                raise ValueError(f"low_k regime requires k in {{1, 2}} (got k={self.k})")
            if self.lam < 1:
                raise ValueError("lambda must be >= 1")

    @property
    def carrier(self) -> float:
        f = 2.0**self.n
        return f if self.kind == HIGH_K else self.lam * f

    def min_points(self, half_length: float) -> int:
        """Smallest N allowed by the rule N >= 8 * carrier * L / pi."""
        return int(math.ceil(8.0 * self.carrier * half_length / math.pi))

    def grid_for(self, half_length: float) -> Grid:
        """Smallest power-of-two grid satisfying the resolution rule."""
        need = max(self.min_points(half_length), 16)
        return Grid(half_length, 1 << int(math.ceil(math.log2(need))))


@dataclass(frozen=True)
class DataPair:
    regime: DataRegime
    bump: Bump
    f: Field
    g: Field

    @property
    def sum(self) -> Field:
        return self.f + self.g


def make_pair(regime: DataRegime, grid: Grid, spec: BumpSpec = BumpSpec()) -> DataPair:
    """Build (f_n, g_n) for the regime on the grid.

    Raises:
        ResolutionError: if N < 8 * carrier * L / pi.
    """
    need = regime.min_points(grid.half_length)
    if grid.points < need:
        raise ResolutionError(
            f"{regime.kind} n={regime.n}: need N >= {need} for L={grid.half_length}, got {grid.points}"
        )
    bump = build_bump(spec, grid)
    n, k = regime.n, regime.k
    two_n = 2.0**n
    T = spec.transform
    if regime.kind == HIGH_K:
        fh = lambda xi: 2.0**-n * 0.5 * (T(xi - two_n) + T(xi + two_n))
        g_scale = 2.0 ** (-n / k)
    else:
        lam = regime.lam
        fh = lambda xi: 2.0 ** (-2 * n) * 0.5 * (T((xi - lam * two_n) / two_n) + T((xi + lam * two_n) / two_n))
        g_scale = 2.0**-n
    f = Field(grid, _from_transform(grid, fh))
    g = Field(grid, g_scale * bump.field.values)
    return DataPair(regime, bump, f, g)


@dataclass
class PairBounds:
    """Measured size and leading-term quantities of a data pair, with pass flags."""

    regime: DataRegime
    constant: float
    checks: dict

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())


def check_pair_bounds(pair: DataPair) -> PairBounds:
    """Evaluate the size bounds and the leading-term lower bound on the grid.

    The constant C is measured once from phi (sum of sup norms of phi and its
    first derivatives, times (1 + lambda)^3 in the low_k regime) and reused for
    every n.
    """
    reg = pair.regime
    n, k = reg.n, reg.k
    L = pair.f.grid.half_length
    sups = pair.bump.derivative_sups()
    phi0 = pair.bump.phi0
    f, g = pair.f.values, pair.g.values
    d = {j: (f if j == 0 else rderivative(f, L, j)) for j in range(4)}
    gd = {j: (g if j == 0 else rderivative(g, L, j)) for j in range(3)}
    sup = lambda a: float(np.max(np.abs(a)))
    g_c2 = sup(gd[0]) + sup(gd[1]) + sup(gd[2])
    checks = {}
    if reg.kind == HIGH_K:
        C = sups[0] + sups[1] + sups[2]
        rate = 2.0 ** (-n / k)
        # g_n is exactly rate * phi, so this holds with equality up to the
        # round-off of the spectral second derivative, ~eps * xi_max^2
        checks["g_c2"] = _le(g_c2, C * rate * (1.0 + 1e-9))
        checks["f_linf"] = _le(sup(d[0]), C * 2.0**-n)
        checks["f_slope"] = _le(sup(d[1]), C)
        checks["f_curv"] = _le(sup(d[2]), C * 2.0**n)
        lead = sup((f + g) ** k * d[2])
        checks["leading_term"] = _ge(lead, phi0 ** (k + 1) / 2.0)
    else:
        lam = reg.lam
        C = (1.0 + lam) ** 3 * (sups[0] + sups[1] + sups[2] + sups[3])
        checks["g_c2"] = _le(g_c2, C * 2.0**-n)
        checks["f_linf"] = _le(sup(d[0]), C * 2.0**-n)
        for j in (1, 2, 3):
            checks[f"f_d{j}"] = _le(sup(d[j]), C * 2.0 ** ((j - 1) * n))
        phi_h1 = h1_parts(pair.bump.field.values, L)
        checks["f_h1"] = _le(h1_parts(f, L), (2.0 * lam + 1.0) * phi_h1 * 2.0 ** (-n / 2))
        g_h1 = h1_parts(g, L)
        checks["g_h1_identity"] = {
            "value": g_h1,
            "bound": 2.0**-n * phi_h1,
            "ok": abs(g_h1 - 2.0**-n * phi_h1) <= 1e-10 * max(1.0, g_h1),
        }
        lead = sup(g * d[2])
        checks["leading_term"] = _ge(lead, lam**2 * phi0**2 / 2.0)
    return PairBounds(reg, C, checks)


def _le(value: float, bound: float) -> dict:
    return {"value": float(value), "bound": float(bound), "ok": bool(value <= bound)}


def _ge(value: float, bound: float) -> dict:
    return {"value": float(value), "bound": float(bound), "ok": bool(value >= bound)}


# ---------------------------------------------------------------------------
# peakons
# ---------------------------------------------------------------------------

# the mollifier is a Gaussian whose standard deviation is a quarter of the
# requested width, so the crest drop is sqrt(2/pi)/4 ~ 0.1995 of the width
STD_PER_WIDTH = 0.25


def smoothed_kink(x: np.ndarray, sigma: float) -> np.ndarray:
    """exp(-|x|) convolved with a centered Gaussian of standard deviation sigma."""
    x = np.asarray(x, dtype=float)
    if sigma == 0.0:
        return np.exp(-np.abs(x))
    r2 = math.sqrt(2.0)
    out = np.empty_like(x)
    for sign in (1.0, -1.0):
        xs = sign * x
        z = (sigma**2 - xs) / (sigma * r2)
        term = np.empty_like(x)
        pos = z >= 0
        # erfcx keeps exp(s^2/2 - x) erfc(z) finite where erfc underflows
        term[pos] = special.erfcx(z[pos]) * np.exp(-xs[pos] ** 2 / (2 * sigma**2))
        term[~pos] = np.exp(sigma**2 / 2 - xs[~pos]) * special.erfc(z[~pos])
        if sign > 0:
            out[:] = 0.5 * term
        else:
            out += 0.5 * term
    return out


def make_peakon(
    c: float,
    k: int,
    center: float,
    mollify_scale: float,
    grid: Grid,
    normalize_crest: bool = False,
) -> Field:
    """c^(1/k) exp(-|x - center|) on the box, optionally smoothed at the crest.

    Args:
        c: wave speed, positive.
        k: nonlinearity exponent.
        center: crest position inside the box; distances are periodic.
        mollify_scale: full width of the Gaussian mollifier (four standard
            deviations); 0 gives the raw kink.
        grid: target grid.
        normalize_crest: rescale the mollified profile so its maximum is
            c^(1/k) again. Smoothing lowers the crest by about 0.8 sigma, and
            since a gCHN peakon moves at speed height^k, the plain convolution
            travels measurably slower than c.
    """
    if c <= 0:
        raise ValueError("peakon speed c must be positive")
    if mollify_scale < 0:
        raise ValueError("mollify_scale must be nonnegative")
    L = grid.half_length
    if not (-L <= center < L):
        raise ValueError("center must lie inside the box")
    d = np.mod(grid.x - center + L, 2 * L) - L
    amp = c ** (1.0 / k)
    sigma = STD_PER_WIDTH * mollify_scale
    shape = smoothed_kink(d, sigma)
    if normalize_crest and sigma > 0:
        shape = shape / float(smoothed_kink(np.zeros(1), sigma)[0])
    return Field(grid, amp * shape)
