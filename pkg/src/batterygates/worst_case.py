"""Multi-start estimator for the worst-case (entangled-input) infidelity."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class WorstCaseResult(NamedTuple):
    estimate: float  # a lower bound on the worst-case infidelity
    state: np.ndarray  # maximizing input in ancilla (x) system order, length d^2
    restart: int
    converged: bool


def minimal_kraus(ops: np.ndarray, rtol: float = 1e-14) -> np.ndarray:
    """Equivalent Kraus operators (at most d^2) from the Choi matrix spectrum."""
    k, d, _ = ops.shape
    vecs = ops.reshape(k, d * d)
    choi = vecs.T @ vecs.conj()
    w, u = np.linalg.eigh(choi)
    keep = w > rtol * max(w.max(), 1e-300)
    return (u[:, keep] * np.sqrt(w[keep])).T.reshape(-1, d, d)


def _fidelity(psi: np.ndarray, b: np.ndarray):
    # psi: (R, d, d) with psi[r, x, s]; output fidelity depends on sigma = psi^T conj(psi)
    sigma = np.einsum("rxs,rxt->rst", psi, psi.conj())
    a = np.einsum("kts,rst->rk", b, sigma)
    return np.sum(np.abs(a) ** 2, axis=1), a


def worst_case_infidelity(
    kraus,
    gate,
    restarts: int = 64,
    seed: int = 0,
    tol: float = 1e-12,
    max_iter: int = 5000,
) -> WorstCaseResult:
    """Maximize 1 - <Psi|(I (x) V^dagger) Phi(|Psi><Psi|) (I (x) V)|Psi> over pure inputs.

    Projected gradient descent on the unit sphere of ancilla-system vectors,
    one batch of ``restarts`` starting points. Restart 0 is the maximally
    entangled state, so the estimate is never below the Choi infidelity.
    Deterministic for a fixed seed.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    ops = kraus.operators if hasattr(kraus, "operators") else np.asarray(kraus, dtype=complex)
    v = gate.matrix if hasattr(gate, "matrix") else np.asarray(gate, dtype=complex)
    d = v.shape[0]
    b = np.einsum("ji,kjl->kil", v.conj(), minimal_kraus(ops))  # V^dagger K

    rng = np.random.default_rng(seed)
    psi = rng.normal(size=(restarts, d, d)) + 1j * rng.normal(size=(restarts, d, d))
    psi[0] = np.eye(d)
    psi /= np.linalg.norm(psi, axis=(1, 2), keepdims=True)

    f, a = _fidelity(psi, b)
    step = np.full(restarts, 0.5)
    active = np.ones(restarts, dtype=bool)
    for _ in range(max_iter):
        # Wirtinger gradient of F with respect to conj(psi) is psi @ M
        m = np.einsum("rk,kst->rts", a.conj(), b) + np.einsum("rk,kst->rst", a, b.conj())
        g = psi @ m
        g -= np.real(np.einsum("rxs,rxs->r", psi.conj(), g))[:, None, None] * psi
        gnorm = np.linalg.norm(g, axis=(1, 2))
        trial = psi - step[:, None, None] * g
        trial /= np.linalg.norm(trial, axis=(1, 2), keepdims=True)
        f_new, a_new = _fidelity(trial, b)
        accept = (f_new <= f) & active
        psi[accept] = trial[accept]
        f[accept] = f_new[accept]
        a[accept] = a_new[accept]
        step = np.where(accept, step * 1.5, step * 0.5)
        active &= step * gnorm >= tol
        if not active.any():
            break
    best = int(np.argmin(f))  # argmin returns the lowest index on ties
    return WorstCaseResult(float(1.0 - f[best]), psi[best].reshape(-1).copy(), best, bool(not active.any()))
