"""Target gates, their angle parametrization and asymmetry quantifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .errors import NonUnitary

TWO_PI = 2.0 * np.pi


def _frozen(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=complex)
    arr.setflags(write=False)
    return arr


def unitarity_error(matrix: np.ndarray) -> float:
    """Operator-norm distance of ``M^dagger M`` from the identity."""
    m = np.asarray(matrix, dtype=complex)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]), ord=2))


def _check_unitary(matrix: np.ndarray, tol: float) -> None:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonUnitary(f"expected a square matrix, got shape {m.shape}")
    err = unitarity_error(m)
    if not err <= tol:
        raise NonUnitary(f"matrix is not unitary (error {err:.3e} > {tol:.1e})")


def angle_matrix(theta: float, gamma: float, delta_phase: float) -> np.ndarray:
    """The 2x2 unitary with moduli set by ``theta`` and phases by ``gamma``, ``delta_phase``.

    V00 = cos(theta), V01 = sin(theta) e^{-i gamma},
    V10 = sin(theta) e^{i(gamma + delta)}, V11 = -cos(theta) e^{i delta}.
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [c, s * np.exp(-1j * gamma)],
            [s * np.exp(1j * (gamma + delta_phase)), -c * np.exp(1j * delta_phase)],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class QubitGate:
    """A target qubit unitary together with its canonical angles.

    ``matrix`` equals ``angle_matrix(theta, gamma, delta_phase)`` up to a global
    phase. ``degenerate`` is set when theta is 0 or pi/2 and one phase is not
    determined by the matrix (it is then reported as 0).
    """

    theta: float
    gamma: float
    delta_phase: float
    matrix: np.ndarray = field(repr=False)
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        if self.matrix.shape != (2, 2):
            raise NonUnitary("qubit gate must be 2x2")
        _check_unitary(self.matrix, 1e-12)

    @property
    def dim(self) -> int:
        return 2

    @property
    def v01_abs(self) -> float:
        return float(abs(self.matrix[0, 1]))

    @classmethod
    def from_matrix(cls, matrix) -> "QubitGate":
        m = np.asarray(matrix, dtype=complex)
        a = angles_from_matrix(m)
        return cls(a.theta, a.gamma, a.delta_phase, m, a.degenerate)

    def to_json(self) -> dict:
        return {"type": "qubit", "theta": self.theta, "gamma": self.gamma, "delta": self.delta_phase}


@dataclass(frozen=True)
class QuditGate:
    """A target unitary on d equally spaced levels."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        if self.dim < 2 or self.matrix.shape != (self.dim, self.dim):
            raise NonUnitary(f"dim {self.dim} does not match matrix shape {self.matrix.shape}")
        _check_unitary(self.matrix, 1e-12)

    @classmethod
    def from_matrix(cls, matrix) -> "QuditGate":
        m = np.asarray(matrix, dtype=complex)
        return cls(m.shape[0], m)

    def to_json(self) -> dict:
        return {"type": "matrix", "re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}


Gate = Union[QubitGate, QuditGate]


class GateAngles(NamedTuple):
    theta: float
    gamma: float
    delta_phase: float
    global_phase: float
    degenerate: bool


def _wrap(angle: float) -> float:
    a = float(np.mod(angle, TWO_PI))
    # mod can round up to exactly 2*pi for tiny negative inputs
    return 0.0 if a >= TWO_PI else a


def angles_from_matrix(matrix, tol: float = 1e-10) -> GateAngles:
    """Invert :func:`angle_matrix`.

    Returns angles and ``global_phase`` such that
    ``matrix = exp(i*global_phase) * angle_matrix(theta, gamma, delta_phase)``.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (2, 2):
        raise NonUnitary(f"expected a 2x2 matrix, got shape {m.shape}")
    _check_unitary(m, tol)
    c_abs, s_abs = abs(m[0, 0]), abs(m[0, 1])
    theta = float(np.arctan2(s_abs, c_abs))
    small = 1e-12
    if c_abs > small and s_abs > small:
        phi = np.angle(m[0, 0])
        delta = np.angle(-m[1, 1]) - phi
        gamma = np.angle(m[1, 0]) - phi - delta
        degenerate = False
    elif s_abs <= small:
        # diagonal: gamma is not determined
        theta = 0.0
        phi = np.angle(m[0, 0])
        delta = np.angle(-m[1, 1]) - phi
        gamma = 0.0
        degenerate = True
    else:
        # antidiagonal: V01 fixed real nonnegative, gamma reported as 0
        theta = np.pi / 2
        phi = np.angle(m[0, 1])
        gamma = 0.0
        delta = np.angle(m[1, 0]) - phi
        degenerate = True
    return GateAngles(theta, _wrap(gamma), _wrap(delta), _wrap(phi), degenerate)


def gate_from_angles(theta: float, gamma: float, delta_phase: float) -> QubitGate:
    """Build a qubit gate from angles; theta is folded into [0, pi/2]."""
    m = angle_matrix(theta, gamma, delta_phase)
    return QubitGate.from_matrix(m)


def hadamard() -> QubitGate:
    return gate_from_angles(np.pi / 4, 0.0, 0.0)


def asymmetry_weight(gate: QubitGate) -> float:
    """|V01|^2 = sin^2(theta)."""
    return float(abs(gate.matrix[0, 1]) ** 2)


def superdiagonal_weights(matrix) -> np.ndarray:
    """w[k + d - 1] = sum over entries with row - col = k of |V|^2, k = -(d-1)..d-1."""
    m = np.abs(np.asarray(matrix)) ** 2
    d = m.shape[0]
    return np.array([np.trace(m, offset=-k) for k in range(-(d - 1), d)])


def qudit_asymmetry(gate: Gate) -> float:
    """A[V] = sum_j (j^2/d) sum_{|l-k|=j} |V_lk|^2."""
    m = gate.matrix
    d = m.shape[0]
    w = superdiagonal_weights(m)
    k = np.arange(-(d - 1), d)
    return float(np.sum(k**2 * w) / d)


def system_hamiltonian(dim: int, omega: float = 1.0) -> np.ndarray:
    """Equally spaced system Hamiltonian; for d=2 it is (omega/2)(|1><1| - |0><0|)."""
    if dim == 2:
        return np.diag([-omega / 2, omega / 2])
    return np.diag(omega * np.arange(dim, dtype=float))


def is_energy_preserving(gate: Gate, tol: float = 1e-12) -> bool:
    if not tol > 0:
        raise ValueError("tol must be positive")
    m = gate.matrix
    h = system_hamiltonian(m.shape[0])
    return bool(np.linalg.norm(m @ h - h @ m, ord=2) <= tol)


def gate_from_json(obj: dict) -> Gate:
    kind = obj.get("type")
    if kind == "qubit":
        return gate_from_angles(float(obj["theta"]), float(obj.get("gamma", 0.0)), float(obj.get("delta", 0.0)))
    if kind == "matrix":
        m = np.array(obj["re"], dtype=float) + 1j * np.array(obj.get("im", np.zeros_like(obj["re"])), dtype=float)
        if m.shape == (2, 2):
            return QubitGate.from_matrix(m)
        return QuditGate.from_matrix(m)
    raise ValueError(f"unknown gate type {kind!r}")
