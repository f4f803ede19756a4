import math

import numpy as np
import pytest
from scipy import fft

from batterygates.battery import BatteryState
from batterygates.channel import choi_infidelity_closed, choi_infidelity_exact, kraus_set, target_copy_unitary
from batterygates.errors import SupportViolation
from batterygates.gates import gate_from_angles, hadamard
from batterygates.spectral import (
    DstCoefficients,
    dirichlet_laplacian,
    dst_forward,
    dst_inverse,
    dst_matrix,
    infidelity_spectral,
    min_levels_bound,
    mode_weights,
    optimal_sine_state,
    sine_mode_infidelity,
)

from conftest import random_state


def supported_state(rng, N):
    b = rng.normal(size=N) + 1j * rng.normal(size=N)
    b[0] = 0
    return BatteryState.normalized(b)


@pytest.mark.parametrize("N", [2, 3, 16, 255, 1024])
def test_orthogonality(N):
    S = dst_matrix(N)
    np.testing.assert_allclose(S @ S, np.eye(N - 1), atol=1e-12)


@pytest.mark.parametrize("N", [5, 64, 1000])
def test_matches_scipy_dst(N, rng):
    x = rng.normal(size=N - 1)
    np.testing.assert_allclose(dst_matrix(N) @ x, fft.dst(x, type=1, norm="ortho"), atol=1e-12)


def test_single_level_coefficients():
    c = dst_forward(BatteryState.level(1, 4), 4).coeffs
    np.testing.assert_allclose(c, math.sqrt(0.5) * np.sin(np.pi * np.arange(1, 4) / 4), atol=1e-15)


def test_sine_state_is_first_mode():
    c = dst_forward(optimal_sine_state(32), 32).coeffs
    assert abs(c[0]) == pytest.approx(1.0, abs=1e-13)
    assert np.max(np.abs(c[1:])) < 1e-13


def test_parseval_and_involution(rng):
    for N in (4, 33, 128, 1024):
        s = supported_state(rng, N)
        c = dst_forward(s, N)
        assert np.sum(np.abs(c.coeffs) ** 2) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(dst_inverse(c), s.amplitudes, atol=1e-12)


def test_support_violation(rng):
    with pytest.raises(SupportViolation):
        dst_forward(random_state(rng, 8), 8)
    with pytest.raises(SupportViolation):
        dst_forward(supported_state(rng, 10), 6)


def test_laplacian_is_diagonalized(rng):
    for N in (8, 100):
        s = supported_state(rng, N)
        b = s.amplitudes[1:]
        quad = np.real(b.conj() @ dirichlet_laplacian(N) @ b)
        c = dst_forward(s, N).coeffs
        lam = 4 * np.sin(np.pi * np.arange(1, N) / (2 * N)) ** 2
        assert quad == pytest.approx(np.dot(lam, np.abs(c) ** 2), abs=1e-12)


def test_spectral_matches_dense_form(rng):
    # 4s sum sin^2(1 - s sin^2)|c|^2 equals s (b^T L b) - s^2/4 (b^T L^2 b)
    g = gate_from_angles(0.6, 0.2, 0.1)
    s_ = abs(g.matrix[0, 1]) ** 2
    for N in (6, 50):
        st = supported_state(rng, N)
        b = st.amplitudes[1:]
        L = dirichlet_laplacian(N)
        dense = s_ * np.real(b.conj() @ L @ b) - s_**2 / 4 * np.real(b.conj() @ L @ L @ b)
        assert infidelity_spectral(dst_forward(st, N), g) == pytest.approx(dense, abs=1e-12)


def test_first_mode_value():
    g = hadamard()
    N = 64
    c = DstCoefficients(N, np.eye(N - 1)[0])
    assert infidelity_spectral(c, g) == pytest.approx(sine_mode_infidelity(N, 0.5), abs=1e-14)
    assert infidelity_spectral(dst_forward(optimal_sine_state(N), N), g) == pytest.approx(sine_mode_infidelity(N, 0.5), abs=1e-14)
    assert infidelity_spectral(c, gate_from_angles(0, 0, 0)) == 0


@pytest.mark.parametrize("s", np.round(np.arange(0.1, 1.01, 0.1), 2))
def test_first_mode_is_optimal(s):
    for N in (2, 3, 17, 64, 256):
        f = mode_weights(N, s)
        assert np.argmin(f) == 0 or (s == 1.0 and f[-1] == pytest.approx(f[0]))


def test_mode_degeneracy_at_full_asymmetry():
    f = mode_weights(40, 1.0)
    assert f[0] == pytest.approx(f[-1], rel=1e-12)


class TestOptimalSineState:
    def test_two_levels(self):
        np.testing.assert_allclose(optimal_sine_state(2).amplitudes, [0, 1], atol=1e-16)

    def test_four_levels(self):
        a = optimal_sine_state(4).amplitudes.real
        e = np.array([0, np.sin(np.pi / 4), 1, np.sin(3 * np.pi / 4)])
        np.testing.assert_allclose(a, e / np.linalg.norm(e), atol=1e-15)

    def test_exact_vs_first_mode(self):
        # the closed form differs from the first-mode value by the ground boundary term
        g = hadamard()
        for N in (8, 32, 128):
            st = optimal_sine_state(N)
            exact = choi_infidelity_exact(kraus_set(target_copy_unitary(g, N), st), g)
            assert exact == pytest.approx(choi_infidelity_closed(st, g), abs=1e-14)
            assert exact - sine_mode_infidelity(N, 0.5) == pytest.approx(-0.25 * math.sin(math.pi / N) ** 2 / N, rel=1e-8)

    def test_boundary_difference_decays_cubically(self):
        g = hadamard()
        Ns = np.array([16, 32, 64, 128])
        diffs = [abs(choi_infidelity_closed(optimal_sine_state(N), g) - sine_mode_infidelity(N, 0.5)) for N in Ns]
        slope = np.polyfit(np.log(Ns), np.log(diffs), 1)[0]
        assert slope == pytest.approx(-3.0, abs=0.02)


class TestLevelsBound:
    def test_inversion(self):
        N, v = 50, 0.6
        assert min_levels_bound(math.pi**2 * v**2 / N**2, v).leading == pytest.approx(N)

    def test_hadamard(self):
        b = min_levels_bound(1e-4, 1 / math.sqrt(2))
        assert b.leading == pytest.approx(222.1, abs=0.05)
        assert abs(b.exact - b.leading) < 1

    def test_exact_threshold_inverts_first_mode(self):
        for v in (0.3, 0.7, 1.0):
            for eps in (1e-3, 1e-5):
                b = min_levels_bound(eps, v)
                assert sine_mode_infidelity(b.exact, v**2) == pytest.approx(eps, rel=1e-9)
                assert b.exact <= b.leading + 1

    def test_range(self):
        with pytest.raises(ValueError):
            min_levels_bound(0.0, 0.5)
