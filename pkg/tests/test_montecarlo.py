import math
from dataclasses import replace

import numpy as np
import pytest

from sixghz_coexistence.analytic import coverage
from sixghz_coexistence.exceptions import DegenerateTierError, RedrawBudgetExceeded
from sixghz_coexistence.geometry import Band, Tier
from sixghz_coexistence.models import Window
from sixghz_coexistence.radio import aggregate_interference, associate_wifi
from sixghz_coexistence.services import montecarlo
from sixghz_coexistence.services.montecarlo import (
    CoverageSimulator,
    CoverageTally,
    simulate_coverage,
    wilson_interval,
)
from sixghz_coexistence.units import db_to_linear

CURVES = [
    (Tier.CELLULAR, Band.LICENSED),
    (Tier.CELLULAR, Band.UNLICENSED),
    (Tier.WIFI, Band.LICENSED),
    (Tier.WIFI, Band.UNLICENSED),
]


class TestWilsonInterval:
    def test_symmetric_at_one_half(self):
        low, high, half_width = wilson_interval(50, 100)
        assert low == pytest.approx(0.5 - half_width)
        assert high == pytest.approx(0.5 + half_width)
        assert half_width == pytest.approx(0.1247, abs=1e-3)

    def test_clipped_at_bounds(self):
        low, high, _ = wilson_interval(0, 20)
        assert low == 0.0
        assert 0.0 < high < 1.0

    def test_needs_trials(self):
        with pytest.raises(ValueError):
            wilson_interval(0, 0)

    def test_half_width_scales_with_sample_size(self):
        """Doubling the trials at the same proportion shrinks the interval by about 1/sqrt(2)."""
        _, _, small = wilson_interval(120, 400)
        _, _, large = wilson_interval(240, 800)
        assert large / small == pytest.approx(1.0 / math.sqrt(2.0), rel=0.01)


class TestCoverageTally:
    def test_counts_per_threshold(self):
        tally = CoverageTally([0.0, 10.0])
        for value in (0.5, 5.0, 50.0):
            tally.add_realization(value)
        assert list(tally.successes) == [2, 1]
        assert [e.p_hat for e in tally.estimates()] == pytest.approx([2 / 3, 1 / 3])

    def test_merge(self):
        first, second = CoverageTally([0.0]), CoverageTally([0.0])
        first.add_realization(2.0)
        second.add_realization(0.5)
        second.add_redraws(3)
        first.merge(second)
        assert first.realizations == 2
        assert first.redraws == 3
        assert list(first.successes) == [1]


class TestCoverageSimulator:
    def test_reproducible_across_thread_counts(self, scenario, fast_mc):
        """Realizations own their streams, so the split between threads does not matter."""
        mc = replace(fast_mc, n_realizations=60)
        single = simulate_coverage(scenario, Tier.WIFI, Band.UNLICENSED, 0.7, 0.2, mc, threads=1)
        threaded = simulate_coverage(scenario, Tier.WIFI, Band.UNLICENSED, 0.7, 0.2, mc, threads=3)
        assert single == threaded

    def test_seed_changes_the_estimate(self, scenario, fast_mc):
        mc = replace(fast_mc, n_realizations=60)
        first = simulate_coverage(scenario, Tier.CELLULAR, Band.LICENSED, 0.7, 0.2, mc)
        reseeded = replace(mc, seed=4)
        second = simulate_coverage(scenario, Tier.CELLULAR, Band.LICENSED, 0.7, 0.2, reseeded)
        assert [e.p_hat for e in first] != [e.p_hat for e in second]

    def test_empty_serving_band(self, scenario, fast_mc):
        with pytest.raises(DegenerateTierError):
            CoverageSimulator(scenario, fast_mc).simulate(Tier.CELLULAR, Band.UNLICENSED, 0.0, 0.2)

    def test_redraw_budget(self, scenario, fast_mc):
        """A window almost never holding a BS exhausts the redraw budget."""
        sparse = scenario.replace(lambda_c=1e-12)
        mc = replace(fast_mc, n_realizations=5, redraw_factor=3, window=Window(100.0))
        with pytest.raises(RedrawBudgetExceeded):
            CoverageSimulator(sparse, mc).simulate(Tier.CELLULAR, Band.LICENSED, 0.0, 0.0)

    def test_estimates_cover_the_grid(self, scenario, fast_mc):
        mc = replace(fast_mc, n_realizations=40)
        estimates = simulate_coverage(scenario, Tier.WIFI, Band.LICENSED, 0.7, 0.2, mc)
        assert [e.gamma_db for e in estimates] == list(mc.gamma_db_grid)
        assert all(e.n == 40 for e in estimates)
        p_hats = [e.p_hat for e in estimates]
        assert p_hats == sorted(p_hats, reverse=True)

    @pytest.mark.parametrize("tier,band", CURVES)
    def test_coverage_falls_with_threshold(self, scenario, fast_mc, tier, band):
        """One SINR per realization is compared against the whole grid."""
        grid = tuple(float(g) for g in np.arange(-10.0, 20.5, 2.5))
        mc = replace(fast_mc, n_realizations=80, gamma_db_grid=grid)
        p_hats = [e.p_hat for e in simulate_coverage(scenario, tier, band, 0.7, 0.2, mc)]
        assert all(later <= earlier for earlier, later in zip(p_hats, p_hats[1:]))


class TestWifiAssociation:
    def test_in_range_picks_a_sampled_ap(self, scenario, fast_mc, monkeypatch):
        """The chosen AP serves the user and is left out of the interferers."""
        chosen, heard = [], []

        def recording_associate(candidates, rho_w, rng, receiver=(0.0, 0.0)):
            index = associate_wifi(candidates, rho_w, rng, receiver)
            if index is not None:
                chosen.append(candidates.xy[index])
            return index

        def recording_interference(interferers, alpha, rng, powers, receiver=(0.0, 0.0)):
            heard.append(interferers.xy)
            return aggregate_interference(interferers, alpha, rng, powers, receiver)

        monkeypatch.setattr(montecarlo, "associate_wifi", recording_associate)
        monkeypatch.setattr(montecarlo, "aggregate_interference", recording_interference)
        mc = replace(fast_mc, n_realizations=30, wifi_association="in-range")
        simulate_coverage(scenario, Tier.WIFI, Band.LICENSED, 0.7, 0.2, mc)

        assert len(chosen) == len(heard) == 30
        for serving, interferers in zip(chosen, heard):
            assert np.hypot(*serving) <= scenario.rho_w
            assert not np.any(np.all(interferers == serving, axis=1))

    def test_in_range_redraws_without_ap_in_range(self, scenario, fast_mc):
        sparse = scenario.replace(lambda_w=1e-9)
        mc = replace(fast_mc, n_realizations=5, redraw_factor=3, wifi_association="in-range")
        with pytest.raises(RedrawBudgetExceeded):
            CoverageSimulator(sparse, mc).simulate(Tier.WIFI, Band.LICENSED, 0.0, 0.0)

    def test_serving_distance_mode_always_has_an_ap(self, scenario, fast_mc):
        """The added AP does not depend on the sampled ones, so no licensed realization fails."""
        sparse = scenario.replace(lambda_w=1e-9)
        mc = replace(fast_mc, n_realizations=5, redraw_factor=1)
        estimates = CoverageSimulator(sparse, mc).simulate(Tier.WIFI, Band.LICENSED, 0.0, 0.0)
        assert all(e.n == 5 for e in estimates)
        assert estimates[0].p_hat >= 0.8

    def test_in_range_reproducible_across_thread_counts(self, scenario, fast_mc):
        mc = replace(fast_mc, n_realizations=40, wifi_association="in-range")
        single = simulate_coverage(scenario, Tier.WIFI, Band.UNLICENSED, 0.7, 0.6, mc, threads=1)
        threaded = simulate_coverage(scenario, Tier.WIFI, Band.UNLICENSED, 0.7, 0.6, mc, threads=4)
        assert single == threaded


@pytest.mark.slow
class TestAnalyticAgreement:
    @pytest.mark.parametrize("tier,band", CURVES)
    def test_reference_scenario(self, scenario, fast_mc, tier, band):
        """Closed-form curves fall inside the 99% interval of the simulation."""
        estimates = simulate_coverage(scenario, tier, band, 0.7, 0.2, fast_mc)
        for estimate in estimates:
            expected = coverage(tier, band, db_to_linear(estimate.gamma_db), 0.7, 0.2, scenario)
            assert abs(estimate.p_hat - expected) <= estimate.ci99 + 0.03

    @pytest.mark.parametrize("tier", [Tier.CELLULAR, Tier.WIFI])
    def test_without_incumbents(self, scenario, fast_mc, tier):
        quiet = scenario.replace(lambda_z=0.0)
        mc = replace(fast_mc, n_realizations=1000)
        for estimate in simulate_coverage(quiet, tier, Band.UNLICENSED, 0.5, 0.5, mc):
            gamma = db_to_linear(estimate.gamma_db)
            expected = coverage(tier, Band.UNLICENSED, gamma, 0.5, 0.5, quiet)
            assert abs(estimate.p_hat - expected) <= 1.5 * estimate.ci99

    def test_interval_shrinks_with_realizations(self, scenario, fast_mc):
        mc = replace(fast_mc, n_realizations=300, gamma_db_grid=(0.0,))
        small = simulate_coverage(scenario, Tier.CELLULAR, Band.LICENSED, 0.7, 0.2, mc)[0]
        doubled = replace(mc, n_realizations=600)
        large = simulate_coverage(scenario, Tier.CELLULAR, Band.LICENSED, 0.7, 0.2, doubled)[0]
        assert large.ci99 / small.ci99 == pytest.approx(1.0 / math.sqrt(2.0), rel=0.1)
