"""Norm functionals on grid fields.

Sup norms are grid maxima. Derivatives are spectral unless the caller already
has an exact derivative (e.g. from the chain rule along characteristics), in
which case the ``*_parts`` helpers take value and slope arrays directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Field, _same_grid, rderivative


@dataclass(frozen=True)
class NormSet:
    linf: float
    c1: float
    h1: float
    min_slope: float

    def __post_init__(self):
        if self.linf < 0 or self.h1 < 0 or self.c1 < self.linf:
            raise ValueError(f"inconsistent norms: {self}")


def linf_norm(u: Field) -> float:
    return float(np.max(np.abs(u.values)))


def c1_parts(values: np.ndarray, slope: np.ndarray) -> float:
    """sup|f| + sup|f'| from precomputed samples of f and f'."""
    return float(np.max(np.abs(values)) + np.max(np.abs(slope)))


def c1_norm(u: Field) -> float:
    ux = rderivative(u.values, u.grid.half_length, 1)
    return c1_parts(u.values, ux)


def c1_distance(u: Field, v: Field) -> float:
    """||u - v||_{C^1} with a spectral derivative of the difference."""
    _same_grid(u, v)
    return c1_norm(Field(u.grid, u.values - v.values))


def h1_parts(values: np.ndarray, L: float) -> float:
    N = values.size
    c = np.fft.rfft(values)
    xi = np.pi * np.arange(N // 2 + 1) / L
    w = np.full(N // 2 + 1, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    energy = np.sum(w * (1.0 + xi**2) * np.abs(c) ** 2) * (2.0 * L) / N**2
    return float(np.sqrt(energy))


def h1_norm(u: Field) -> float:
    """sqrt(int u^2 + u_x^2 dx) over the box, by Parseval."""
    return h1_parts(u.values, u.grid.half_length)


def norm_set(u: Field) -> NormSet:
    ux = rderivative(u.values, u.grid.half_length, 1)
    linf = float(np.max(np.abs(u.values)))
    return NormSet(
        linf=linf,
        c1=linf + float(np.max(np.abs(ux))),
        h1=h1_parts(u.values, u.grid.half_length),
        min_slope=float(np.min(ux)),
    )
