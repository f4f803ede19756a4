"""Equally spaced d-level targets: channel, asymptotics and the two-level-block scheme."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np

from .battery import BatteryState, ShapeProfile, continuous_ud, resource_report, sample_ansatz
from .channel import KrausSet, choi_infidelity_exact, kraus_from_blocks, kraus_traces, target_copy_unitary
from .errors import GateNotBlockForm, NonUnitary, TruncationMismatch
from .gates import QubitGate, QuditGate
from .gates import qudit_asymmetry, superdiagonal_weights


@dataclass(frozen=True)
class QuditBlockUnitary:
    """Energy-preserving unitary organized by energy shells.

    Shell n holds |n-i>_B|i>_S for i = 0..min(n, d-1); ``blocks[n]`` is d x d
    with entry (i, j) mapping |n-j>|j> to |n-i>|i>. For partial shells
    n < d-1 only the leading (n+1) x (n+1) corner is used and must be unitary;
    shell 0 is the fixed ground state. States with up to ``truncation`` levels
    are covered.
    """

    dim: int
    truncation: int
    blocks: np.ndarray = field(repr=False)

    def __post_init__(self):
        d, T = self.dim, self.truncation
        b = np.array(self.blocks, dtype=complex)
        if b.shape != (T + d - 1, d, d):
            raise ValueError(f"expected blocks of shape {(T + d - 1, d, d)}, got {b.shape}")
        full = b[d - 1 :]
        eye = np.eye(d)
        err = np.max(np.linalg.norm(np.einsum("nji,njk->nik", full.conj(), full) - eye, ord=2, axis=(1, 2)))
        if err > 1e-12:
            raise NonUnitary(f"block unitarity error {err:.2e}")
        b[0] = eye
        for n in range(1, d - 1):
            corner = b[n, : n + 1, : n + 1].copy()
            if np.linalg.norm(corner.conj().T @ corner - np.eye(n + 1), ord=2) > 1e-12:
                raise NonUnitary(f"partial shell {n} is not unitary")
            b[n] = eye
            b[n, : n + 1, : n + 1] = corner
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)


def qudit_target_copy(gate: Union[QuditGate, QubitGate], truncation: int) -> QuditBlockUnitary:
    """Full shells copy the gate; a partial shell copies its corner of the gate
    when that corner is unitary and is the identity otherwise."""
    v = gate.matrix
    d = v.shape[0]
    if truncation < d:
        raise ValueError("truncation must be at least d")
    blocks = np.array(np.broadcast_to(v, (truncation + d - 1, d, d)))
    blocks[0] = np.eye(d)
    for n in range(1, d - 1):
        corner = v[: n + 1, : n + 1]
        blocks[n] = np.eye(d)
        if np.linalg.norm(corner.conj().T @ corner - np.eye(n + 1), ord=2) <= 1e-12:
            blocks[n, : n + 1, : n + 1] = corner
    return QuditBlockUnitary(d, truncation, blocks)


def qudit_kraus_set(unitary: QuditBlockUnitary, state: BatteryState) -> KrausSet:
    if state.truncation > unitary.truncation:
        raise TruncationMismatch(
            f"state has {state.truncation} levels but the unitary covers {unitary.truncation}"
        )
    return KrausSet(kraus_from_blocks(unitary.blocks, state.amplitudes), unitary, state)


def qudit_choi_infidelity(unitary: QuditBlockUnitary, state: BatteryState, gate) -> float:
    """1 - (1/d^2) sum_m |Tr[V^dagger K^{(m)}]|^2 from the explicit Kraus operators."""
    return choi_infidelity_exact(qudit_kraus_set(unitary, state), gate)


def qudit_choi_infidelity_traces(state: BatteryState, gate) -> float:
    """Second evaluator for the target-copy channel, organized by diagonals.

    For full shells Tr[V^dagger K^{(m)}] = d beta_m + sum_{k != 0} w_k (beta_{m+k} - beta_m),
    with w_k the weight of the k-th diagonal (row - col = k). Kraus indices
    whose shells are partial are summed entry by entry.
    """
    v = gate.matrix
    d = v.shape[0]
    T = state.truncation
    M = T + d - 1
    b = np.zeros(M + 2 * d, dtype=complex)
    off = d
    b[off : off + T] = state.amplitudes
    w = superdiagonal_weights(v)
    m = np.arange(M)
    traces = d * b[off + m]
    for k in range(-(d - 1), d):
        if k != 0:
            traces = traces + w[k + d - 1] * (b[off + m + k] - b[off + m])
    # Kraus indices touching partial shells are summed entry by entry
    corner_ok = [True] + [
        np.linalg.norm(v[: n + 1, : n + 1].conj().T @ v[: n + 1, : n + 1] - np.eye(n + 1), ord=2) <= 1e-12
        for n in range(1, d - 1)
    ]
    for mm in range(min(d - 1, M)):
        t = 0.0j
        for i in range(d):
            shell = mm + i
            for j in range(d):
                if shell >= d - 1 or (shell > 0 and corner_ok[shell]):
                    u = v[i, j] if shell >= d - 1 or (i <= shell and j <= shell) else float(i == j)
                else:
                    u = float(i == j)
                t += np.conj(v[i, j]) * u * b[off + mm + i - j]
        traces[mm] = t
    return float(1.0 - np.sum(np.abs(traces) ** 2) / d**2)


def qudit_asymptotic_infidelity(profile: ShapeProfile, delta: float, gate) -> float:
    """Leading order A[V] delta^2 UD(psi)."""
    return qudit_asymmetry(gate) * delta**2 * continuous_ud(profile)


# two-level-block scheme


def embed_two_level(gate: QubitGate, d: int) -> QuditGate:
    """V2 on span{|0>, |d-1>}, identity elsewhere."""
    m = np.eye(d, dtype=complex)
    v = gate.matrix
    m[0, 0], m[0, d - 1], m[d - 1, 0], m[d - 1, d - 1] = v[0, 0], v[0, 1], v[1, 0], v[1, 1]
    return QuditGate(d, m)


def extract_two_level(gate: QuditGate, tol: float = 1e-12) -> QubitGate:
    d = gate.dim
    m = gate.matrix
    ext = [0, d - 1]
    inner = list(range(1, d - 1))
    mask = np.ones((d, d), dtype=bool)
    mask[np.ix_(ext, ext)] = False
    mask[np.ix_(inner, inner)] = False
    if np.any(np.abs(m[mask]) > tol) or (inner and np.linalg.norm(m[np.ix_(inner, inner)] - np.eye(d - 2)) > tol):
        raise GateNotBlockForm("gate must act as V2 on {|0>, |d-1>} and as the identity elsewhere")
    return QubitGate.from_matrix(m[np.ix_(ext, ext)])


def scheme_two_infidelity(two_level: QubitGate, d: int, state: BatteryState) -> float:
    """Battery with gap (d-1) omega driving only the extremal levels.

    The qubit target-copy channel on {|0>, |d-1>} plus beta_n times the identity
    on the d-2 middle levels.
    """
    T = max(state.truncation, 2)
    ks = target_copy_unitary(two_level, T)
    from .channel import kraus_set

    traces = kraus_traces(kraus_set(ks, state), two_level)
    beta = state.padded(traces.size)[: traces.size]
    full = traces + (d - 2) * beta
    return float(1.0 - np.sum(np.abs(full) ** 2) / d**2)


def scheme_two_kraus(two_level: QubitGate, d: int, state: BatteryState) -> np.ndarray:
    """Explicit d x d Kraus operators of the two-level-block scheme."""
    from .channel import kraus_set

    k2 = kraus_set(target_copy_unitary(two_level, max(state.truncation, 2)), state).operators
    beta = state.padded(k2.shape[0])[: k2.shape[0]]
    out = np.zeros((k2.shape[0], d, d), dtype=complex)
    ext = [0, d - 1]
    for n in range(k2.shape[0]):
        out[n][np.ix_(ext, ext)] = k2[n]
        for i in range(1, d - 1):
            out[n, i, i] = beta[n]
    return out


@dataclass(frozen=True)
class SchemeComparison:
    d: int
    delta: float
    eps_scheme1: float
    eps_scheme2: float
    ratio: float  # eps_scheme1 / eps_scheme2 at equal delta
    predicted_ratio: float
    eps_scheme2_equal_cost: float  # scheme II at delta_II = (d-1) delta
    resources: dict

    def to_json(self) -> dict:
        return asdict(self)


def scheme_two_compare(two_level_gate, d: int, profile: ShapeProfile, delta: float, omega: float = 1.0) -> SchemeComparison:
    """Compare the full-ladder scheme with the extremal-level scheme for V2 (+) identity."""
    if isinstance(two_level_gate, QuditGate):
        if two_level_gate.dim != d:
            raise GateNotBlockForm("gate dimension differs from d")
        v2 = extract_two_level(two_level_gate)
    else:
        v2 = two_level_gate
    full = embed_two_level(v2, d)
    state = sample_ansatz(profile, delta, omega=omega)
    eps1 = qudit_choi_infidelity(qudit_target_copy(full, max(state.truncation, d)), state, full)
    eps2 = scheme_two_infidelity(v2, d, state)

    gap2 = omega * (d - 1)
    state2 = sample_ansatz(profile, delta * (d - 1), omega=gap2)
    eps2_cost = scheme_two_infidelity(v2, d, state2)
    r1 = resource_report(state)
    r2 = resource_report(state2)
    resources = {
        "scheme1": {"omega": omega, **r1.to_json()},
        "scheme2": {"omega": gap2, **r2.to_json()},
    }
    ratio = eps1 / eps2 if eps2 > 0 else float("nan")
    return SchemeComparison(d, delta, eps1, eps2, ratio, float((d - 1) ** 2), eps2_cost, resources)
