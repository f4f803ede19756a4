import math

import numpy as np
import pytest

from batterygates.battery import (
    BatteryState,
    average_ud,
    continuous_ud,
    custom_profile,
    discrete_ud,
    gaussian_profile,
    resource_report,
    sample_ansatz,
    sine_profile,
)
from batterygates.errors import BadWeights, NotNormalizable, TailTruncated
from batterygates.spectral import optimal_sine_state
from batterygates.variational import airy_profile, hermite1_profile

from conftest import random_state


class TestBatteryState:
    def test_rejects_unnormalized(self):
        with pytest.raises(NotNormalizable):
            BatteryState(1.0, [1.0, 1.0])

    def test_rejects_short(self):
        with pytest.raises(ValueError):
            BatteryState(1.0, [1.0])

    def test_json_round_trip(self, rng):
        s = random_state(rng, 7)
        again = BatteryState.from_json(s.to_json())
        np.testing.assert_array_equal(again.amplitudes, s.amplitudes)

    def test_immutable(self):
        s = BatteryState.level(1, 3)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 1.0


class TestResourceReport:
    def test_single_level(self):
        r = resource_report(BatteryState.level(1, 4, omega=2.0))
        assert (r.mean_energy, r.mean_sq_energy, r.qfi, r.level_count) == (2.0, 4.0, 0.0, 1)
        assert r.discrete_ud == 2.0

    def test_sine_state_discrete_ud(self):
        # lowest Dirichlet mode: eigenvalue 4 sin^2(pi/2N) of the discrete Laplacian
        N = 64
        r = resource_report(optimal_sine_state(N))
        assert r.discrete_ud == pytest.approx(4 * math.sin(math.pi / (2 * N)) ** 2, rel=1e-13)
        assert r.discrete_ud == pytest.approx(math.pi**2 / N**2, rel=1e-3)

    def test_sine_squared_energy_ratio(self):
        N = 1024
        r = resource_report(optimal_sine_state(N))
        assert r.mean_sq_energy * r.discrete_ud == pytest.approx(math.pi**2 / 3 - 0.5, rel=1e-3)

    def test_invariants(self, rng):
        for _ in range(50):
            s = random_state(rng, int(rng.integers(2, 40)))
            r = resource_report(s)
            assert r.mean_sq_energy >= r.mean_energy**2 - 1e-12
            assert r.qfi >= 0

    def test_qfi_zero_only_for_single_level(self, rng):
        s = random_state(rng, 5)
        assert resource_report(s).qfi > 0

    def test_phase_rotation(self, rng):
        for _ in range(100):
            s = random_state(rng, 12)
            rotated = BatteryState.normalized(np.abs(s.amplitudes))
            a, b = resource_report(s), resource_report(rotated)
            assert a.mean_energy == pytest.approx(b.mean_energy)
            assert a.qfi == pytest.approx(b.qfi)
            assert b.discrete_ud <= a.discrete_ud + 1e-14


class TestSampling:
    def test_sine_samples(self):
        s = sample_ansatz(sine_profile(), 1 / 8)
        assert s.truncation == 8
        expected = np.sin(np.pi * np.arange(8) / 8)
        np.testing.assert_allclose(s.amplitudes.real, expected / np.linalg.norm(expected), atol=1e-15)

    def test_ground_is_exactly_zero(self):
        s = sample_ansatz(airy_profile(3.0), 0.1)
        assert s.amplitudes[0] == 0

    def test_airy_mean_energy(self):
        r = resource_report(sample_ansatz(airy_profile(50.0), 1.0))
        assert r.mean_energy == pytest.approx(50.0, rel=0.02)

    def test_tail_check(self):
        with pytest.raises(TailTruncated):
            sample_ansatz(hermite1_profile(100.0), 1.0, truncation=10)

    def test_all_zero(self):
        with pytest.raises(NotNormalizable):
            sample_ansatz(sine_profile(), 1.0, truncation=2)


class TestUnitaryDefect:
    def test_sine(self):
        assert continuous_ud(sine_profile()) == pytest.approx(math.pi**2, abs=1e-10)
        assert continuous_ud(sine_profile(4.0)) == pytest.approx(math.pi**2 / 16, abs=1e-10)

    def test_hermite(self):
        assert continuous_ud(hermite1_profile(100.0)) == pytest.approx(9 / 400, rel=1e-6)

    @pytest.mark.parametrize("width", [0.5, 2.0, 7.0])
    def test_far_gaussian(self, width):
        g = gaussian_profile(15 * width, width)
        assert continuous_ud(g) == pytest.approx(1 / (4 * width**2), rel=1e-9)

    def test_average(self):
        a, b = sine_profile(1.0), sine_profile(2.0)
        assert average_ud([(1.0, a)]) == pytest.approx(continuous_ud(a))
        assert average_ud([(0.5, a), (0.5, a)]) == pytest.approx(continuous_ud(a))
        assert average_ud([(0.5, a), (0.5, b)]) == pytest.approx(0.5 * (math.pi**2 + math.pi**2 / 4))

    def test_bad_weights(self):
        with pytest.raises(BadWeights):
            average_ud([(0.7, sine_profile()), (0.2, sine_profile())])

    def test_discrete_converges_second_order_scaling(self):
        # discrete_ud ~ delta^2 UD, the remainder shrinking at least linearly in delta
        p = hermite1_profile(1.0)
        ud = continuous_ud(p)
        errs = []
        for delta in (1 / 16, 1 / 32, 1 / 64):
            s = sample_ansatz(p, delta)
            errs.append(abs(discrete_ud(s.amplitudes) / delta**2 - ud))
        order = np.log2(errs[1] / errs[2])
        assert order >= 1.0


def test_custom_profile_normalizes():
    p = custom_profile(lambda x: np.asarray(x) * np.exp(-np.asarray(x)), lambda x: (1 - np.asarray(x)) * np.exp(-np.asarray(x)), extent=50.0)
    assert p.norm_squared() == pytest.approx(1.0, abs=1e-10)
    # closed form: UD of sqrt(4) x e^{-x} is 4 * 1/4 = 1
    assert continuous_ud(p) == pytest.approx(1.0, rel=1e-9)
