"""
Periodic Fourier grid and the linear spectral operators used everywhere else.

Fields live on the box [-L, L) with N equispaced samples x_j = -L + j*dx.
The continuous transform convention is u_hat(xi) = integral of exp(-i x xi) u(x),
so the discrete coefficients carry a factor dx and a phase (-1)^m coming from
the shifted origin of the box. Wavenumber of mode m is xi_m = pi*m/L.

Operators provided:
    - forward/inverse transform (to_spectral, to_physical)
    - derivative of order 1..3
    - Helmholtz inverse (1 - d_xx)^{-1}, diagonal multiplier 1/(1 + xi^2)
    - smoothed derivative d_x (1 - d_xx)^{-1}
    - truncation dealiasing for products of a given polynomial degree

Internally the solver works with real FFTs on raw numpy arrays; the Field
wrappers below are what the public API hands around.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class BlowUpError(ValueError):
    """A field contains NaN or Inf samples."""


class ResolutionError(ValueError):
    """The grid is too coarse (or too short) for the requested data."""


@dataclass(frozen=True)
class Grid:
    """Periodic grid on [-half_length, half_length) with `points` samples."""

    half_length: float
    points: int

    def __post_init__(self):
        if not np.isfinite(self.half_length) or self.half_length <= 0:
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        if int(self.points) != self.points or self.points % 2 or self.points < 16:
            raise ValueError(f"points must be an even integer >= 16, got {self.points}")
        object.__setattr__(self, "points", int(self.points))
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.points

    @property
    def x(self) -> np.ndarray:
        return _nodes(self.half_length, self.points)

    @property
    def modes(self) -> np.ndarray:
        """Integer mode numbers in FFT order."""
        return np.fft.fftfreq(self.points, 1.0 / self.points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """xi_m = pi*m/L in FFT order."""
        return np.pi * self.modes / self.half_length

    @property
    def rwavenumbers(self) -> np.ndarray:
        """Non-negative wavenumbers matching numpy's rfft layout."""
        return _rxi(self.half_length, self.points)

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.points))

    def sample(self, func) -> "Field":
        """Evaluate `func` at the nodes and wrap the result."""
        return Field(self, np.asarray(func(self.x), dtype=float))


@lru_cache(maxsize=64)
def _nodes(L: float, N: int) -> np.ndarray:
    x = -L + np.arange(N) * (2.0 * L / N)
    x.setflags(write=False)
    return x


@lru_cache(maxsize=64)
def _rxi(L: float, N: int) -> np.ndarray:
    xi = np.pi * np.arange(N // 2 + 1) / L
    xi.setflags(write=False)
    return xi


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a function on a Grid.

    Non-finite samples are rejected unless ``blow_up`` is set, which marks the
    terminal state of a diverged run.
    """

    grid: Grid
    values: np.ndarray
    blow_up: bool = field(default=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.grid.points,):
            raise ValueError(
                f"expected {self.grid.points} samples, got shape {vals.shape}"
            )
        if not self.blow_up and not np.all(np.isfinite(vals)):
            raise BlowUpError("field has non-finite samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __add__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """Fourier modes of a Field, FFT ordering, continuous-transform scaling."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex, copy=True)
        if c.shape != (self.grid.points,):
            raise ValueError("coefficient count does not match grid")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        c = self.coefficients
        mirrored = np.conj(c[(-np.arange(c.size)) % c.size])
        scale = max(np.max(np.abs(c)), 1e-300)
        # the Nyquist mode has no partner; only its imaginary part matters
        return bool(np.max(np.abs(c - mirrored)) <= tol * scale)


def _same_grid(a: Field, b: Field) -> None:
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


def _phase(grid: Grid) -> np.ndarray:
    # exp(i xi_m L) = (-1)^m for the box origin at -L
    return np.where(grid.modes % 2 == 0, 1.0, -1.0)


def to_spectral(f: Field) -> SpectralCoeffs:
    """Forward transform with the continuous convention u_hat = int e^{-ix xi} u dx."""
    if f.blow_up or not np.all(np.isfinite(f.values)):
        raise BlowUpError("cannot transform a blown-up field")
    g = f.grid
    return SpectralCoeffs(g, g.spacing * _phase(g) * np.fft.fft(f.values))


def to_physical(c: SpectralCoeffs) -> Field:
    """Inverse of :func:`to_spectral`; the imaginary round-off is discarded."""
    g = c.grid
    raw = np.fft.ifft(c.coefficients * _phase(g) / g.spacing)
    return Field(g, raw.real)


# --- raw-array kernels (rfft based) used by the solver and by the wrappers ---


def rderivative(values: np.ndarray, L: float, order: int = 1) -> np.ndarray:
    N = values.size
    xi = _rxi(L, N)
    mult = (1j * xi) ** order
    if order % 2:
        mult = mult.copy()
        mult[-1] = 0.0
    return np.fft.irfft(mult * np.fft.rfft(values), n=N)


def rmultiplier(values: np.ndarray, L: float, mult: np.ndarray) -> np.ndarray:
    return np.fft.irfft(mult * np.fft.rfft(values), n=values.size)


@lru_cache(maxsize=32)
def helmholtz_symbol(L: float, N: int) -> np.ndarray:
    s = 1.0 / (1.0 + _rxi(L, N) ** 2)
    s.setflags(write=False)
    return s


@lru_cache(maxsize=32)
def smoothed_derivative_symbol(L: float, N: int) -> np.ndarray:
    xi = _rxi(L, N)
    s = 1j * xi / (1.0 + xi**2)
    s[-1] = 0.0
    s.setflags(write=False)
    return s


def cutoff_mode(N: int, degree: int) -> int:
    """Largest mode kept when products of the given degree must be alias free.

    Modes with |m| * (degree + 1) >= N are discarded. This equals the rule
    |m| > N/(degree+1) except when N/(degree+1) is an integer, where the
    boundary mode would still receive aliased energy and is dropped as well.
    """
    if degree < 1:
        raise ValueError("degree must be a positive integer")
    return (N - 1) // (degree + 1)


@lru_cache(maxsize=32)
def dealias_mask_r(N: int, degree: int) -> np.ndarray:
    m = np.arange(N // 2 + 1)
    mask = (m <= cutoff_mode(N, degree)).astype(float)
    mask.setflags(write=False)
    return mask


# --- public Field-level operations ---


def derivative(f: Field, order: int = 1) -> Field:
    """Spectral derivative of order 1, 2 or 3; the Nyquist mode is dropped for odd orders."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    _check_finite(f)
    return Field(f.grid, rderivative(f.values, f.grid.half_length, order))


def helmholtz_inverse(f: Field) -> Field:
    """Solve g - g'' = f on the periodic box."""
    _check_finite(f)
    g = f.grid
    return Field(g, rmultiplier(f.values, g.half_length, helmholtz_symbol(g.half_length, g.points)))


def smoothed_derivative(f: Field) -> Field:
    """d_x (1 - d_xx)^{-1} f, i.e. the convolution of f with G' where G = exp(-|x|)/2."""
    _check_finite(f)
    g = f.grid
    return Field(
        g, rmultiplier(f.values, g.half_length, smoothed_derivative_symbol(g.half_length, g.points))
    )


def dealias(c: SpectralCoeffs, degree: int) -> SpectralCoeffs:
    """Zero every mode a degree-`degree` product could alias into."""
    keep = np.abs(c.grid.modes) <= cutoff_mode(c.grid.points, degree)
    return SpectralCoeffs(c.grid, np.where(keep, c.coefficients, 0.0))


def dealias_field(f: Field, degree: int) -> Field:
    return to_physical(dealias(to_spectral(f), degree))


def fourier_interpolate(values: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited upsampling of periodic samples by an integer factor.

    The Nyquist coefficient is split evenly so that real data stay real and the
    original samples are reproduced exactly (to round-off).
    """
    N = values.size
    if factor == 1:
        return np.array(values, dtype=float)
    c = np.fft.rfft(values)
    M = N * factor
    out = np.zeros(M // 2 + 1, dtype=complex)
    out[: N // 2] = c[: N // 2]
    out[N // 2] = 0.5 * c[N // 2]
    return np.fft.irfft(out, n=M) * factor


def spectral_tail(values: np.ndarray, degree: int) -> float:
    """Relative amplitude of the modes a dealiased solver would discard."""
    c = np.abs(np.fft.rfft(values))
    top = np.max(c)
    if top == 0.0:
        return 0.0
    cut = cutoff_mode(values.size, degree)
    return float(np.max(c[cut + 1 :], initial=0.0) / top)


def _check_finite(f: Field) -> None:
    if f.blow_up or not np.all(np.isfinite(f.values)):
        raise BlowUpError("field has non-finite samples")
