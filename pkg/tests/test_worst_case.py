import numpy as np
import pytest

from batterygates.channel import (
    choi_infidelity_exact,
    kraus_set,
    sandwich_check,
    uniform_angle_unitary,
    worst_case_infidelity,
)
from batterygates.worst_case import minimal_kraus

from conftest import random_gate, random_state


def trash_and_replace(rho):
    w, u = np.linalg.eigh(rho)
    d = rho.shape[0]
    return np.array([np.sqrt(max(wi, 0)) * np.outer(u[:, i], np.eye(d)[j]) for i, wi in enumerate(w) for j in range(d)])


def phase_gate(d, phi):
    v = np.eye(d, dtype=complex)
    v[0, 0], v[1, 1] = np.exp(1j * phi), np.exp(-1j * phi)
    return v


@pytest.mark.parametrize("d", [2, 3, 4])
def test_trash_and_replace_saturates(d):
    ops = trash_and_replace(np.eye(d) / d)
    eps_c = choi_infidelity_exact(ops, np.eye(d))
    assert eps_c == pytest.approx(1 - 1 / d**2)
    r = worst_case_infidelity(ops, np.eye(d), restarts=8)
    assert r.estimate == pytest.approx(eps_c, abs=1e-12)


def test_pure_replacement_reaches_one():
    rho = np.diag([1.0, 0.0])
    r = worst_case_infidelity(trash_and_replace(rho), np.eye(2), restarts=8)
    assert r.estimate == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_phase_gate_closed_forms(d):
    phi = 0.3
    v = phase_gate(d, phi)
    ident = np.eye(d)[None]
    c = np.cos(phi)
    eps_c = choi_infidelity_exact(ident, v)
    assert eps_c == pytest.approx(4 * (1 - c) / d * (1 - (1 - c) / d), rel=1e-12)
    r = worst_case_infidelity(ident, v, restarts=16)
    assert r.estimate == pytest.approx(np.sin(phi) ** 2, rel=1e-9)


def test_phase_gate_ratio_limit():
    for d in (3, 4, 5, 6):
        v = phase_gate(d, 1e-3)
        ident = np.eye(d)[None]
        ratio = worst_case_infidelity(ident, v, restarts=16).estimate / choi_infidelity_exact(ident, v)
        assert ratio == pytest.approx(d / 2, rel=1e-3)


def test_deterministic(rng):
    g = random_gate(rng)
    k = kraus_set(uniform_angle_unitary(0.4, rng.uniform(0, 6, (5, 3))), random_state(rng, 5))
    a = worst_case_infidelity(k, g, restarts=10, seed=3)
    b = worst_case_infidelity(k, g, restarts=10, seed=3)
    assert a.estimate == b.estimate and a.restart == b.restart
    np.testing.assert_array_equal(a.state, b.state)


def test_minimal_kraus_preserves_channel(rng):
    k = kraus_set(uniform_angle_unitary(0.9, rng.uniform(0, 6, (9, 3))), random_state(rng, 9)).operators
    small = minimal_kraus(k)
    assert small.shape[0] <= 4
    rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    out = lambda ops: np.einsum("kij,jl,kml->im", ops, rho, ops.conj())
    np.testing.assert_allclose(out(small), out(k), atol=1e-12)


def test_sandwich_on_random_channels(rng):
    for _ in range(40):
        T = int(rng.integers(2, 8))
        g = random_gate(rng)
        k = kraus_set(uniform_angle_unitary(rng.uniform(0, np.pi / 2), rng.uniform(0, 6, (T, 3))), random_state(rng, T))
        eps_c = choi_infidelity_exact(k, g)
        r = worst_case_infidelity(k, g, restarts=8, seed=1)
        assert r.estimate >= eps_c - 1e-12
        assert sandwich_check(r.estimate, eps_c, 2)
        # the returned input achieves the returned value
        psi = r.state.reshape(2, 2)
        sigma = psi.T @ psi.conj()
        b = np.einsum("ji,kjl->kil", g.matrix.conj(), k.operators)
        f = np.sum(np.abs(np.einsum("kts,st->k", b, sigma)) ** 2)
        assert 1 - f == pytest.approx(r.estimate, abs=1e-12)
