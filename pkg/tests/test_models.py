import math

import pytest

from sixghz_coexistence.exceptions import DivergenceError, ParameterError
from sixghz_coexistence.models import (
    ActionVector,
    Entity,
    GameConfig,
    McConfig,
    Window,
    check_shares,
)
from sixghz_coexistence.units import per_m2_to_per_km2


class TestScenario:
    def test_thinned_intensities(self, scenario):
        """Cellular and WiFi intensities outside the exclusion zones."""
        assert per_m2_to_per_km2(scenario.lambda_c_bar) == pytest.approx(22.048, abs=1e-3)
        assert per_m2_to_per_km2(scenario.lambda_w_bar) == pytest.approx(88.19, abs=1e-2)

    def test_path_loss_must_exceed_two(self, scenario):
        with pytest.raises(DivergenceError):
            scenario.replace(alpha=2.0)

    def test_negative_intensity(self, scenario):
        with pytest.raises(ParameterError):
            scenario.replace(lambda_c=-1.0)

    def test_unknown_convention(self, scenario):
        with pytest.raises(ParameterError):
            scenario.replace(self_interference="other")

    def test_hashable(self, scenario):
        """Scenarios key the coverage caches."""
        assert hash(scenario) == hash(scenario.replace())


class TestActionVector:
    def test_bounds(self):
        with pytest.raises(ParameterError):
            ActionVector(1.1, 0.0)
        with pytest.raises(ParameterError):
            ActionVector(0.0, -0.1)

    def test_distance(self):
        assert ActionVector(0.0, 0.0).distance(ActionVector(0.3, 0.4)) == pytest.approx(0.5)

    def test_on_grid(self):
        assert ActionVector(0.3, 0.7).on_grid(0.1)
        assert not ActionVector(0.25, 0.7).on_grid(0.1)


class TestEntity:
    def test_share_bounds(self):
        with pytest.raises(ParameterError):
            Entity(v_c=1.5, v_w=0.0)

    def test_weight_required_for_owned_tier(self):
        with pytest.raises(ParameterError):
            Entity(v_c=0.5, v_w=0.0, theta_c=0.0)

    def test_weight_ignored_for_absent_tier(self):
        entity = Entity(v_c=1.0, v_w=0.0, theta_w=0.0)
        assert entity.v_w == 0.0

    def test_with_action(self):
        entity = Entity(v_c=1.0, v_w=1.0).with_action(ActionVector(0.5, 0.5))
        assert entity.action == ActionVector(0.5, 0.5)


class TestCheckShares:
    def test_shares_sum_to_one(self, two_entities):
        check_shares(two_entities)

    def test_absent_tier_is_allowed(self):
        """A cellular-only game has all WiFi shares at zero."""
        check_shares([Entity(v_c=1.0, v_w=0.0)])

    def test_partial_sum(self):
        with pytest.raises(ParameterError):
            check_shares([Entity(v_c=0.5, v_w=1.0), Entity(v_c=0.3, v_w=0.0)])

    def test_no_entity(self):
        with pytest.raises(ParameterError):
            check_shares([])


class TestGameConfig:
    def test_grid_size(self):
        assert GameConfig(mu=0.1).grid_size == 11
        assert GameConfig(mu=0.25).grid_size == 5

    def test_mu_must_divide_one(self):
        with pytest.raises(ParameterError):
            GameConfig(mu=0.3)

    def test_default_budget(self):
        """500 activations per entity."""
        assert GameConfig().activation_budget(3) == 1500

    def test_budget_below_entity_count(self):
        with pytest.raises(ParameterError):
            GameConfig(max_activations=2).activation_budget(3)

    def test_burn_in_bounds(self):
        with pytest.raises(ParameterError):
            GameConfig(burn_in_fraction=1.0)


class TestMcConfig:
    def test_defaults(self):
        mc = McConfig()
        assert mc.n_realizations == 2000
        assert mc.gamma_db_grid[0] == -10.0 and mc.gamma_db_grid[-1] == 20.0

    def test_invalid_count(self):
        with pytest.raises(ParameterError):
            McConfig(n_realizations=0)

    def test_wifi_association_modes(self):
        assert McConfig().wifi_association == "serving-distance"
        assert McConfig(wifi_association="in-range").wifi_association == "in-range"
        with pytest.raises(ParameterError):
            McConfig(wifi_association="nearest")

    def test_window_area(self):
        assert Window(1000.0).area == pytest.approx(math.pi * 1e6)
