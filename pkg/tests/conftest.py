"""Shared fixtures and independent reference computations for the test suite.

The helpers here deliberately avoid the package's own spectral and data code:
they rebuild the quantities from numpy primitives so that a test compares two
different routes to the same number.
"""

import math

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)

    return record


# --- independent references -------------------------------------------------


def ref_step(s):
    """Smooth 0-to-1 step on [0, 1] built from exp(-1/s)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    out[s >= 1] = 1.0
    m = (s > 0) & (s < 1)
    with np.errstate(over="ignore"):
        a = np.exp(-1.0 / s[m])
        b = np.exp(-1.0 / (1.0 - s[m]))
    out[m] = a / (a + b)
    return out


def ref_bump_hat(xi):
    return 1.0 - ref_step((np.abs(xi) - 0.25) / 0.25)


def ref_phi0_periodic(L: float) -> float:
    """phi(0) of the 2L-periodized bump: (1/2L) * sum of phi_hat over xi = pi m / L."""
    M = int(0.5 * L / math.pi) + 2
    m = np.arange(-M, M + 1)
    return float(np.sum(ref_bump_hat(np.pi * m / L)) / (2.0 * L))


PHI0_LINE = 3.0 / (8.0 * math.pi)


def ref_xi(N: int, L: float) -> np.ndarray:
    return np.pi * np.fft.fftfreq(N, 1.0 / N) / L


def ref_deriv(v: np.ndarray, L: float, order: int = 1) -> np.ndarray:
    N = v.size
    xi = ref_xi(N, L)
    mult = (1j * xi) ** order
    if order % 2:
        mult[N // 2] = 0.0
    return np.fft.ifft(mult * np.fft.fft(v)).real


def ref_helm(v: np.ndarray, L: float) -> np.ndarray:
    xi = ref_xi(v.size, L)
    return np.fft.ifft(np.fft.fft(v) / (1.0 + xi**2)).real


def ref_project(v: np.ndarray, keep: int) -> np.ndarray:
    c = np.fft.fft(v)
    m = np.abs(np.fft.fftfreq(v.size, 1.0 / v.size))
    c[m > keep] = 0.0
    return np.fft.ifft(c).real


def ref_bandlimited(rng, N: int, keep: int) -> np.ndarray:
    c = np.zeros(N, dtype=complex)
    m = np.arange(1, keep + 1)
    vals = (rng.standard_normal(keep) + 1j * rng.standard_normal(keep)) / m
    c[1 : keep + 1] = vals
    c[-keep:] = np.conj(vals[::-1])
    c[0] = rng.standard_normal()
    v = np.fft.ifft(c).real
    return v / np.max(np.abs(v))
