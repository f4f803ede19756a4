"""Discrete sine transform, optimal fixed-support states and the level-count bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .battery import BatteryState
from .errors import SupportViolation
from .gates import QubitGate, asymmetry_weight

SUPPORT_TOL = 1e-14


def dst_matrix(n_levels: int) -> np.ndarray:
    """S_{kn} = sqrt(2/N) sin(pi k n / N), k, n = 1..N-1. Symmetric and orthogonal."""
    N = int(n_levels)
    idx = np.arange(1, N)
    # reduce k*n mod 2N before scaling so large N keeps full accuracy
    return math.sqrt(2.0 / N) * np.sin(np.pi * (np.outer(idx, idx) % (2 * N)) / N)


@dataclass(frozen=True)
class DstCoefficients:
    n_levels: int
    coeffs: np.ndarray = field(repr=False)  # k = 1..N-1

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if self.n_levels < 2 or c.size != self.n_levels - 1:
            raise ValueError("need N >= 2 and N-1 coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


def _supported(state, n_levels: int) -> np.ndarray:
    amps = state.amplitudes if isinstance(state, BatteryState) else np.asarray(state, dtype=complex).ravel()
    if abs(amps[0]) > SUPPORT_TOL or np.any(np.abs(amps[n_levels:]) > SUPPORT_TOL):
        raise SupportViolation(f"amplitudes must vanish at n = 0 and n >= {n_levels}")
    out = np.zeros(n_levels - 1, dtype=complex)
    m = min(amps.size, n_levels) - 1
    out[:m] = amps[1 : m + 1]
    return out


def dst_forward(state, n_levels: int) -> DstCoefficients:
    """Sine coefficients of a state supported on levels 1..N-1."""
    b = _supported(state, n_levels)
    return DstCoefficients(n_levels, dst_matrix(n_levels) @ b)


def dst_inverse(coeffs: DstCoefficients) -> np.ndarray:
    """Amplitudes beta_0..beta_{N-1} (beta_0 = 0); the transform is its own inverse."""
    return np.concatenate([[0.0], dst_matrix(coeffs.n_levels) @ coeffs.coeffs])


def mode_weights(n_levels: int, v01_sq: float) -> np.ndarray:
    """f(k) = 4 s sin^2(pi k / 2N) (1 - s sin^2(pi k / 2N)), k = 1..N-1."""
    u = np.sin(np.pi * np.arange(1, n_levels) / (2 * n_levels)) ** 2
    return 4 * v01_sq * u * (1 - v01_sq * u)


def infidelity_spectral(coeffs: DstCoefficients, gate: QubitGate) -> float:
    s = asymmetry_weight(gate)
    return float(np.dot(mode_weights(coeffs.n_levels, s), np.abs(coeffs.coeffs) ** 2))


def sine_mode_infidelity(n_levels: int, v01_sq: float) -> float:
    """Infidelity of the lowest sine mode: 4 s sin^2(pi/2N)(1 - s sin^2(pi/2N))."""
    u = math.sin(math.pi / (2 * n_levels)) ** 2
    return 4 * v01_sq * u * (1 - v01_sq * u)


def dirichlet_laplacian(n_levels: int) -> np.ndarray:
    """Tridiagonal (2, -1) matrix on levels 1..N-1."""
    m = n_levels - 1
    return 2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)


def optimal_sine_state(n_levels: int, omega: float = 1.0) -> BatteryState:
    """beta_n proportional to sin(pi n / N) on levels 1..N-1 (truncation N)."""
    if n_levels < 2:
        raise ValueError("N must be at least 2")
    n = np.arange(n_levels)
    amps = np.sin(np.pi * n / n_levels)
    amps[0] = 0.0
    return BatteryState.normalized(amps, omega)


class LevelsBound(NamedTuple):
    leading: float  # pi |V01| / sqrt(eps)
    exact: float  # smallest real N with sine-mode infidelity <= eps


def min_levels_bound(eps_c: float, v01_abs: float) -> LevelsBound:
    """Levels needed for a target Choi infidelity with the optimal sine state."""
    if not 0 < eps_c <= 1:
        raise ValueError("eps_c must lie in (0, 1]")
    if not 0 < v01_abs <= 1:
        raise ValueError("v01_abs must lie in (0, 1]")
    s = v01_abs**2
    leading = math.pi * v01_abs / math.sqrt(eps_c)
    # 4 s u (1 - s u) = eps with u = sin^2(pi/2N), smaller root in s u
    su = 0.5 * (1 - math.sqrt(max(0.0, 1 - eps_c)))
    u = min(su / s, 0.5)
    exact = max(2.0, math.pi / (2 * math.asin(math.sqrt(u))))
    return LevelsBound(leading, exact)
