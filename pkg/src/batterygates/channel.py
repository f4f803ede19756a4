"""Energy-preserving joint unitaries, Kraus operators and Choi infidelities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .battery import BatteryState
from .errors import GroundOccupied, NonUnitary, TruncationMismatch
from .gates import QubitGate, angle_matrix, asymmetry_weight


def _blocks_unitarity_error(blocks: np.ndarray) -> float:
    if blocks.shape[0] == 0:
        return 0.0
    eye = np.eye(blocks.shape[-1])
    prod = np.einsum("nji,njk->nik", blocks.conj(), blocks)
    return float(np.max(np.linalg.norm(prod - eye, ord=2, axis=(1, 2))))


@dataclass(frozen=True)
class BlockUnitary:
    """Energy-preserving system-battery unitary stored block by block.

    ``blocks[n]`` for n = 1..T acts on (|n>_B|0>_S, |n-1>_B|1>_S); entry (i, j)
    maps |n-j>|j> to |n-i>|i>. ``blocks[0]`` only carries the fixed ground
    action in its (0, 0) entry.
    """

    blocks: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.array(self.blocks, dtype=complex)
        if b.ndim != 3 or b.shape[1:] != (2, 2) or b.shape[0] < 3:
            raise ValueError("blocks must have shape (T+1, 2, 2) with T >= 2")
        b[0] = np.diag([1.0, 1.0])
        err = _blocks_unitarity_error(b[1:])
        if err > 1e-12:
            raise NonUnitary(f"block unitarity error {err:.2e}")
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    @property
    def truncation(self) -> int:
        return self.blocks.shape[0] - 1

    @property
    def dim(self) -> int:
        return 2


def target_copy_unitary(gate: QubitGate, truncation: int) -> BlockUnitary:
    """Every two-dimensional block is a copy of the gate."""
    if truncation < 2:
        raise ValueError("truncation must be at least 2")
    blocks = np.broadcast_to(gate.matrix, (truncation + 1, 2, 2))
    return BlockUnitary(blocks)


def uniform_angle_unitary(theta_bar: float, phases, truncation: Optional[int] = None) -> BlockUnitary:
    """Blocks e^{i alpha_n} angle_matrix(theta_bar, gamma_n, delta_n), n = 1..T.

    ``phases`` has one (alpha, gamma, delta) row per block.
    """
    ph = np.asarray(phases, dtype=float).reshape(-1, 3)
    T = ph.shape[0] if truncation is None else int(truncation)
    if ph.shape[0] < T:
        raise ValueError("need one phase triple per block")
    blocks = np.empty((T + 1, 2, 2), dtype=complex)
    blocks[0] = np.eye(2)
    for n in range(1, T + 1):
        alpha, gamma, delta = ph[n - 1]
        blocks[n] = np.exp(1j * alpha) * angle_matrix(theta_bar, gamma, delta)
    return BlockUnitary(blocks)


def kraus_from_blocks(blocks: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """K^{(m)}_{ij} = beta_{m+i-j} U^{(m+i)}_{ij}, m = 0..S-1, for S shells of size d.

    Out-of-range beta and blocks count as zero.
    """
    S, d, _ = blocks.shape
    pad_b = np.zeros(S + 2 * d + 1, dtype=complex)
    off = d  # beta index -d maps to 0
    nb = min(beta.size, S + d)
    pad_b[off : off + nb] = beta[:nb]
    pad_u = np.zeros((S + d, d, d), dtype=complex)
    pad_u[:S] = blocks
    m = np.arange(S)[:, None, None]
    i = np.arange(d)[None, :, None]
    j = np.arange(d)[None, None, :]
    return pad_b[m + i - j + off] * pad_u[m + i, i, j]


@dataclass(frozen=True)
class KrausSet:
    operators: np.ndarray = field(repr=False)
    unitary: object = field(default=None, repr=False)
    state: Optional[BatteryState] = field(default=None, repr=False)

    def completeness_error(self) -> float:
        k = self.operators
        s = np.einsum("kji,kjl->il", k.conj(), k)
        return float(np.linalg.norm(s - np.eye(k.shape[-1]), ord=2))


def kraus_set(unitary: BlockUnitary, state: BatteryState) -> KrausSet:
    if state.truncation > unitary.truncation:
        raise TruncationMismatch(
            f"state has {state.truncation} levels but the unitary covers {unitary.truncation}"
        )
    ops = kraus_from_blocks(unitary.blocks, state.amplitudes)
    return KrausSet(ops, unitary, state)


def _operators(kraus) -> np.ndarray:
    return kraus.operators if isinstance(kraus, KrausSet) else np.asarray(kraus, dtype=complex)


def _matrix(gate) -> np.ndarray:
    return gate.matrix if hasattr(gate, "matrix") else np.asarray(gate, dtype=complex)


def kraus_traces(kraus, gate) -> np.ndarray:
    """Tr[V^dagger K^{(k)}] for every Kraus operator."""
    return np.einsum("ij,kij->k", _matrix(gate).conj(), _operators(kraus))


def choi_infidelity_exact(kraus, gate) -> float:
    """1 - (1/d^2) sum_k |Tr[V^dagger K_k]|^2."""
    v = _matrix(gate)
    d = v.shape[0]
    t = kraus_traces(kraus, v)
    return float(1.0 - np.sum(np.abs(t) ** 2) / d**2)


def boundary_term(beta0: complex, beta1: complex, gate: QubitGate) -> float:
    """Ground-level correction to the bulk sum of the closed form."""
    v = gate.matrix
    s = abs(v[0, 1]) ** 2
    trace0 = beta0 * (np.conj(v[0, 0]) + abs(v[1, 1]) ** 2) + beta1 * s
    return float(abs(beta0) ** 2 + s * (abs(beta1) ** 2 - (beta0 * np.conj(beta1)).real) - 0.25 * abs(trace0) ** 2)


def choi_infidelity_closed(state: BatteryState, gate: QubitGate) -> float:
    """Closed form for the target-copy interaction: bulk finite differences plus boundary term."""
    s = asymmetry_weight(gate)
    T = state.truncation
    b = np.zeros(T + 2, dtype=complex)
    b[:T] = state.amplitudes
    first = b[2:] - b[1:-1]  # beta_{n+1} - beta_n, n = 1..T
    second = b[2:] + b[:-2] - 2 * b[1:-1]
    bulk = float(np.sum(np.abs(first) ** 2) - 0.25 * s * np.sum(np.abs(second) ** 2))
    return s * bulk + boundary_term(b[0], b[1], gate)


# ground-level penalty


class GroundPenalty(NamedTuple):
    eta: float
    applicable: bool  # False for energy-preserving gates, where the bound carries no content


def ground_state_penalty(gate: QubitGate) -> GroundPenalty:
    """The interaction-independent constant of the published case analysis.

    3/8 at theta = pi/4, otherwise (cos^2 - sin^2)^2 / (2 (1 + cos^2)).
    This value is NOT a valid lower bound of eps_C / |beta_0|^2 for every
    interaction; see :func:`ground_penalty_infimum` for the numerically exact
    infimum of the k = 0 Kraus contribution.
    """
    theta = gate.theta
    applicable = gate.v01_abs > 1e-12
    if abs(theta - np.pi / 4) < 1e-12:
        return GroundPenalty(3.0 / 8.0, applicable)
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    return GroundPenalty((c2 - s2) ** 2 / (2 * (1 + c2)), applicable)


def _kraus0_penalty(v: np.ndarray, phi: np.ndarray, chi: np.ndarray) -> np.ndarray:
    # k = 0 Kraus term divided by |beta_0|^2, minimized over beta_1/beta_0 analytically,
    # for the ground-adjacent block row (U10, U11) = (cos phi, sin phi e^{i chi})
    u10 = np.cos(phi)
    u11 = np.sin(phi) * np.exp(1j * chi)
    p = np.conj(v[0, 0]) + np.conj(v[1, 1]) * u11
    q = np.conj(v[1, 0]) * u10
    a = 0.5 * u10**2
    c0 = 0.5 * (1 + np.abs(u11) ** 2)
    A = a - 0.25 * np.abs(q) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        extra = np.where(A > 1e-300, np.abs(p * q) ** 2 / (16 * A), 0.0)
    return c0 - 0.25 * np.abs(p) ** 2 - extra


def ground_penalty_infimum(gate: QubitGate, grid: int = 256) -> float:
    """Infimum over all interactions and states of eps^{(0)} / |beta_0|^2.

    eps^{(0)} = ||K0||^2/d - |Tr V^dagger K0|^2/d^2 is one nonnegative term of
    eps_C, so eps_C >= infimum * |beta_0|^2 holds for every block unitary and
    state. The remaining two-parameter minimization is done on a grid followed
    by local refinement.
    """
    from scipy.optimize import minimize

    v = gate.matrix
    phi = np.linspace(0, np.pi / 2, grid)
    chi = np.linspace(0, 2 * np.pi, 2 * grid, endpoint=False)
    P, X = np.meshgrid(phi, chi, indexing="ij")
    vals = _kraus0_penalty(v, P, X)
    k = np.unravel_index(np.argmin(vals), vals.shape)
    x0 = np.array([P[k], X[k]])
    res = minimize(lambda z: float(_kraus0_penalty(v, z[0], z[1])), x0, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    return float(max(min(res.fun, vals[k]), 0.0))


# uniform-angle interaction bound


def interaction_lower_bound(theta: float, theta_bar: float, state: BatteryState) -> float:
    """Lower bound on eps_C for uniform-angle interactions when beta_0 = 0."""
    b = np.abs(state.amplitudes)
    if b[0] > 1e-12:
        raise GroundOccupied("the bound requires an empty ground level")
    q1 = 2.0 - 2.0 * float(np.dot(b[:-1], b[1:]))
    q2 = 2.0 * (1.0 - float(np.dot(b[:-2], b[2:])))
    return (
        math.sin(theta_bar - theta) ** 2
        + 0.25 * (math.sin(2 * theta_bar) * math.sin(2 * theta) * q1 + math.sin(theta_bar) ** 2 * math.sin(theta) ** 2 * q2)
    )


def sandwich_check(eps_wc: float, eps_c: float, dim: int, slack: float = 1e-10) -> bool:
    """eps_wc / d <= eps_C <= eps_wc, with slack."""
    return bool(eps_wc / dim <= eps_c + slack and eps_c <= eps_wc + slack)


from .worst_case import WorstCaseResult, worst_case_infidelity  # noqa: E402,F401
