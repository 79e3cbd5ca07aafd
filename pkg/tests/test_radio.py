import math

import numpy as np
import pytest

from sixghz_coexistence.exceptions import DivergenceError, DomainError, ParameterError
from sixghz_coexistence.geometry import Deployment, Tier
from sixghz_coexistence.radio import (
    LinkParams,
    NoiseModel,
    aggregate_interference,
    associate_nearest,
    associate_wifi,
    rayleigh_success_probability,
    signal_power,
    sinr,
    tier_powers,
)


class TestSignalPower:
    def test_path_loss(self):
        assert signal_power(2.0, 10.0, 4.0) == pytest.approx(2e-4)

    def test_zero_distance(self):
        with pytest.raises(DomainError):
            signal_power(1.0, 0.0, 4.0)

    def test_array_input(self):
        np.testing.assert_allclose(signal_power(1.0, [1.0, 2.0], 2.5), [1.0, 2.0**-2.5])


class TestSinr:
    def test_plain_ratio(self):
        assert sinr(10.0, 3.0, 2.0) == pytest.approx(2.0)

    def test_zero_denominator(self):
        assert sinr(1.0, 0.0, 0.0) == math.inf

    def test_zero_signal(self):
        assert sinr(0.0, 0.0, 0.0) == 0.0

    def test_negative_input(self):
        with pytest.raises(ParameterError):
            sinr(1.0, -1.0, 0.0)

    @pytest.mark.parametrize("scale", [1e-9, 0.5, 3.0, 1e6])
    def test_common_scale_cancels(self, scale):
        signal = np.array([1.0, 4.0, 0.0, 2.5])
        interference = np.array([0.3, 0.0, 1.0, 7.0])
        noise = np.array([0.1, 2.0, 0.5, 0.0])
        np.testing.assert_allclose(
            sinr(scale * signal, scale * interference, scale * noise),
            sinr(signal, interference, noise),
            rtol=1e-12,
        )


class TestInterference:
    def test_empty_set(self, scenario):
        rng = np.random.default_rng(0)
        assert aggregate_interference(Deployment.empty(), 4.0, rng, tier_powers(scenario)) == 0.0

    def test_mean_of_faded_sum(self, scenario):
        """Unit-mean fading: the average equals the unfaded sum."""
        rng = np.random.default_rng(1)
        points = Deployment.from_points([[10.0, 0.0], [0.0, 20.0]], Tier.CELLULAR)
        samples = [
            aggregate_interference(points, 4.0, rng, tier_powers(scenario)) for _ in range(20000)
        ]
        expected = 2.0 * (10.0**-4 + 20.0**-4)
        assert np.mean(samples) == pytest.approx(expected, rel=0.03)

    def test_diverging_path_loss(self, scenario):
        points = Deployment.from_points([[10.0, 0.0]], Tier.CELLULAR)
        with pytest.raises(DivergenceError):
            aggregate_interference(points, 2.0, np.random.default_rng(0), tier_powers(scenario))

    def test_adding_interferers_never_lowers_the_sum(self, scenario):
        """Same seed, so the first interferers keep their fading draws."""
        rng = np.random.default_rng(5)
        xy = rng.uniform(-500.0, 500.0, size=(40, 2))
        tiers = rng.integers(0, 3, size=40)
        powers = tier_powers(scenario)
        previous = 0.0
        for count in range(1, 41):
            parts = [
                Deployment.from_points(xy[k : k + 1], Tier(int(tiers[k]))) for k in range(count)
            ]
            points = Deployment.concatenate(parts)
            total = aggregate_interference(points, 4.0, np.random.default_rng(9), powers)
            assert total >= previous
            previous = total


class TestRayleighSuccess:
    def test_noise_only(self):
        assert rayleigh_success_probability(2.0, [], 1.0, 4.0) == pytest.approx(math.exp(-2.0))

    def test_single_interferer(self):
        """P(H_s S > gamma H_i I) = 1 / (1 + gamma I / S)."""
        assert rayleigh_success_probability(1.0, [0.5], 0.0, 2.0) == pytest.approx(0.5)

    def test_no_signal(self):
        assert rayleigh_success_probability(0.0, [1.0], 0.0, 1.0) == 0.0


class TestAssociation:
    def test_nearest(self):
        points = Deployment.from_points([[5.0, 0.0], [1.0, 1.0], [0.0, 3.0]], Tier.CELLULAR)
        assert associate_nearest(points) == 1

    def test_nearest_empty(self):
        assert associate_nearest(Deployment.empty()) is None

    def test_wifi_in_range(self):
        points = Deployment.from_points([[60.0, 0.0], [0.0, 30.0]], Tier.WIFI)
        assert associate_wifi(points, 50.0, np.random.default_rng(0)) == 1

    def test_wifi_out_of_range(self):
        points = Deployment.from_points([[60.0, 0.0]], Tier.WIFI)
        assert associate_wifi(points, 50.0, np.random.default_rng(0)) is None


class TestParams:
    def test_link_power(self):
        with pytest.raises(ParameterError):
            LinkParams(p_tx=0.0)

    def test_noise_per_tier(self, scenario):
        noise = NoiseModel.of(scenario.replace(noise_c=1e-12, noise_w=2e-12))
        assert noise.for_tier(Tier.CELLULAR) == 1e-12
        assert noise.for_tier(Tier.WIFI) == 2e-12
