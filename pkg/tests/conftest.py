import sys

import numpy as np
import pytest

from batterygates import BatteryState, gate_from_angles


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_gate(rng):
    return gate_from_angles(*rng.uniform(0, 2 * np.pi, 3))


def random_state(rng, T, ground=True, real=False):
    b = rng.normal(size=T) + (0 if real else 1j * rng.normal(size=T))
    if not ground:
        b[0] = 0
    return BatteryState.normalized(b)


def assemble_global(blocks, dim=2):
    """Dense system-battery matrix from shell blocks (test-only).

    Basis index is battery_level * d + system_level over battery levels 0..L-1,
    where L = number of shells; shells that would leave the space are dropped.
    """
    S = blocks.shape[0]
    L = S
    U = np.zeros((L * dim, L * dim), dtype=complex)
    for n in range(S):
        members = [i for i in range(dim) if 0 <= n - i < L]
        for i in members:
            for j in members:
                U[(n - i) * dim + i, (n - j) * dim + j] = blocks[n][i, j]
    return U


def total_hamiltonian(levels, dim=2):
    hb = np.arange(levels, dtype=float)
    hs = np.arange(dim, dtype=float)
    return np.diag(np.add.outer(hb, hs).ravel())


def schur_adversary(gate, T):
    """State minimizing eps_C / |beta_0|^2 for the target-copy channel on T levels.

    eps_C = beta^dagger (I - C^dagger C / 4) beta for normalized beta, with C the
    linear map beta -> Tr[V^dagger K_n]; the constrained minimum is a Schur complement.
    """
    from batterygates import kraus_set, target_copy_unitary
    from batterygates.channel import kraus_traces

    u = target_copy_unitary(gate, T)
    C = np.stack([kraus_traces(kraus_set(u, BatteryState.level(m, T)), gate) for m in range(T)], axis=1)
    A = np.eye(T) - C.conj().T @ C / 4
    x = np.linalg.solve(A, np.eye(T)[:, 0])
    return BatteryState.normalized(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
