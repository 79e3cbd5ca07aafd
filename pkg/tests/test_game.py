from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from sixghz_coexistence import game
from sixghz_coexistence.exceptions import ParameterError
from sixghz_coexistence.game import (
    BestResponseDynamics,
    GameRecord,
    GameTrace,
    PayoffResult,
    action_grid,
    aggregate_utilization,
    best_response,
    empirical_mixed_strategy,
    evaluate_profile,
    next_actor,
    others_aggregate,
    payoff,
    qos_indicator,
    random_strategy,
    run_dbra,
    verify_equilibrium,
)
from sixghz_coexistence.models import ActionVector, Entity, GameConfig
from sixghz_coexistence.scenario_io import load_scenario
from sixghz_coexistence.units import mbps_to_bps


def _with_actions(entities, actions):
    return [e.with_action(ActionVector(*a)) for e, a in zip(entities, actions)]


class TestUtilization:
    def test_aggregate(self, two_entities):
        entities = _with_actions(two_entities, [(0.5, 1.0), (1.0, 0.0)])
        assert aggregate_utilization(entities) == pytest.approx((0.7, 0.3))

    def test_others(self, two_entities):
        entities = _with_actions(two_entities, [(0.5, 1.0), (1.0, 0.0)])
        assert others_aggregate(0, entities) == pytest.approx((0.4, 0.0))
        assert others_aggregate(1, entities) == pytest.approx((0.3, 0.3))


class TestPayoff:
    def test_threshold_is_inclusive(self):
        entity = Entity(v_c=1.0, v_w=1.0, sigma_hat_c=10.0, sigma_hat_w=20.0)
        assert qos_indicator(entity, 10.0, 20.0) == 1
        assert qos_indicator(entity, 9.9, 20.0) == 0

    def test_absent_tier_is_not_gated(self):
        entity = Entity(v_c=1.0, v_w=0.0, sigma_hat_c=10.0, sigma_hat_w=20.0)
        assert qos_indicator(entity, 10.0, 0.0) == 1

    def test_gate_zeroes_the_payoff(self, scenario):
        greedy = [Entity(v_c=1.0, v_w=1.0, sigma_hat_c=mbps_to_bps(1e4))]
        result = payoff(0, ActionVector(1.0, 0.0), greedy, scenario)
        assert result.qualified == 0
        assert result.value == 0.0
        assert result.rate_c > 0

    def test_weighted_sum(self, scenario):
        entity = [Entity(v_c=1.0, v_w=1.0, theta_c=7.0, theta_w=1.0)]
        result = payoff(0, ActionVector(0.5, 0.5), entity, scenario)
        assert result.value == pytest.approx(7.0 * result.rate_c + result.rate_w)


class TestBestResponse:
    def test_grid_cardinality(self):
        grid = action_grid(0.1)
        assert len(grid) == 121
        assert grid[0] == ActionVector(0.0, 0.0)
        assert grid[1] == ActionVector(0.0, 0.1)

    def test_cellular_only_entity(self, scenario):
        """A lone cellular operator moves every eligible BS to the unlicensed band."""
        entities = [Entity(v_c=1.0, v_w=0.0)]
        assert best_response(0, entities, scenario, 0.1) == ActionVector(1.0, 0.0)

    def test_tie_keeps_current_action(self, scenario):
        entities = [Entity(v_c=1.0, v_w=0.0, action=ActionVector(1.0, 0.5))]
        assert best_response(0, entities, scenario, 0.1) == ActionVector(1.0, 0.5)

    def test_tie_picks_lexicographic_first(self, scenario, monkeypatch):
        def flat_top(entity_index, candidate, entities, scenario, rate_model=None):
            value = 1.0 if candidate.delta_c >= 0.5 else 0.0
            return PayoffResult(value=value, rate_c=0.0, rate_w=0.0, qualified=1)

        monkeypatch.setattr(game, "payoff", flat_top)
        entities = [Entity(v_c=1.0, v_w=1.0, action=ActionVector(0.2, 0.2))]
        assert best_response(0, entities, scenario, 0.1) == ActionVector(0.5, 0.0)

    def test_theta_scale_invariance(self, scenario, two_entities):
        """Scaling both preference weights leaves the best response unchanged."""
        entities = _with_actions(two_entities, [(0.3, 0.3), (0.6, 0.2)])
        scaled = [replace(e, theta_c=3 * e.theta_c, theta_w=3 * e.theta_w) for e in entities]
        for index in range(2):
            assert best_response(index, entities, scenario, 0.1) == best_response(
                index, scaled, scenario, 0.1
            )

    def test_threads_do_not_change_the_answer(self, scenario, two_entities):
        entities = _with_actions(two_entities, [(0.3, 0.3), (0.6, 0.2)])
        assert best_response(1, entities, scenario, 0.1, threads=4) == best_response(
            1, entities, scenario, 0.1
        )


class TestActivation:
    def test_uniform_actor(self):
        rng = np.random.default_rng(5)
        counts = Counter(next_actor(3, rng) for _ in range(3000))
        assert set(counts) == {0, 1, 2}
        assert all(abs(c - 1000) < 120 for c in counts.values())

    def test_no_entity(self):
        with pytest.raises(ParameterError):
            next_actor(0, np.random.default_rng(0))

    def test_random_strategy_range(self, two_entities):
        actions = random_strategy(two_entities * 50, np.random.default_rng(0))
        values = [v for a in actions for v in a.as_tuple()]
        assert min(values) >= 0.1 and max(values) <= 1.0


class TestTrace:
    def _record(self, activation, actor, profile):
        return GameRecord(
            activation=activation,
            actor=actor,
            action=profile[actor],
            payoff=1.0,
            rate_c=1.0,
            rate_w=1.0,
            agg_delta_c=0.0,
            agg_delta_w=0.0,
            profile=profile,
            rates=((1.0, 1.0), (1.0, 1.0)),
        )

    def test_invalid_actor(self):
        trace = GameTrace(initial_profile=(ActionVector(0, 0), ActionVector(0, 0)))
        record = self._record(0, 0, (ActionVector(0, 0),) * 2)
        with pytest.raises(ParameterError):
            trace.append(replace(record, actor=5))

    def test_mixed_strategy_frequencies(self):
        a, b = ActionVector(0.0, 0.0), ActionVector(1.0, 0.0)
        trace = GameTrace(initial_profile=(a, a))
        for step, first in enumerate([a, b, b, a, b]):
            trace.append(self._record(step, 0, (first, a)))
        mixed = empirical_mixed_strategy(trace, burn_in=1)
        assert mixed[0] == {a: 0.25, b: 0.75}
        assert mixed[1] == {a: 1.0}

    def test_burn_in_beyond_trace(self):
        trace = GameTrace(initial_profile=(ActionVector(0, 0),))
        with pytest.raises(ParameterError):
            empirical_mixed_strategy(trace, burn_in=0)


class TestDynamics:
    def test_two_entities_converge(self, scenario, two_entities, game_config):
        outcome = run_dbra(two_entities, scenario, game_config)
        assert outcome.converged
        assert verify_equilibrium(list(outcome.entities), scenario, 0.1) == []
        assert all(outcome.thresholds_met())
        assert outcome.rates == outcome.trace.records[-1].rates

    def test_same_seed_same_trace(self, scenario, two_entities, game_config):
        first = run_dbra(two_entities, scenario, game_config)
        second = run_dbra(two_entities, scenario, game_config)
        assert first.trace.rows() == second.trace.rows()
        assert first.trace.initial_profile == second.trace.initial_profile

    def test_initial_profile_on_grid(self, scenario, two_entities, game_config):
        dynamics = BestResponseDynamics(two_entities, scenario, game_config)
        assert all(action.on_grid(0.1) for action in dynamics.initial_profile())

    def test_aggregates_follow_the_profile(self, scenario, three_entities, game_config):
        outcome = run_dbra(three_entities, scenario, game_config)
        for record in outcome.trace:
            entities = [e.with_action(a) for e, a in zip(three_entities, record.profile)]
            assert (record.agg_delta_c, record.agg_delta_w) == pytest.approx(
                aggregate_utilization(entities)
            )
            assert record.profile[record.actor] == record.action

    def test_three_entities_meet_thresholds(self, scenario, three_entities, game_config):
        outcome = run_dbra(three_entities, scenario, game_config)
        assert all(outcome.thresholds_met())
        assert all(rate_c > 0 and rate_w > 0 for rate_c, rate_w in outcome.rates)

    def test_budget_without_stopping(self, scenario, two_entities):
        cfg = GameConfig(max_activations=40, stop_on_convergence=False, seed=1)
        outcome = run_dbra(two_entities, scenario, cfg)
        assert not outcome.converged
        assert len(outcome.trace) == 40
        assert outcome.burn_in == 8
        for strategy in outcome.mixed_strategy:
            assert sum(strategy.values()) == pytest.approx(1.0)

    def test_time_averaged_rates(self, scenario, two_entities):
        cfg = GameConfig(max_activations=20, stop_on_convergence=False, seed=2)
        outcome = run_dbra(two_entities, scenario, cfg)
        tail = outcome.trace.records[outcome.burn_in :]
        expected = np.mean([record.rates[0][0] for record in tail])
        assert outcome.rates[0][0] == pytest.approx(expected)

    def test_given_initial_profile(self, scenario, two_entities, game_config):
        initial = [ActionVector(0.0, 0.0), ActionVector(0.0, 0.0)]
        outcome = run_dbra(two_entities, scenario, game_config, initial=initial)
        assert outcome.trace.initial_profile == tuple(initial)

    def test_initial_profile_length(self, scenario, two_entities, game_config):
        with pytest.raises(ParameterError):
            run_dbra(two_entities, scenario, game_config, initial=[ActionVector(0, 0)])

    def test_evaluate_profile(self, scenario, two_entities):
        entities = _with_actions(two_entities, [(0.0, 0.0), (0.0, 0.0)])
        rates = evaluate_profile(entities, scenario)
        assert rates[0] == pytest.approx(rates[1])


class TestCellularAgainstWifi:
    @pytest.mark.parametrize("config", ["cellular_vs_wifi.toml", "cellular_vs_wifi_b.toml"])
    def test_thresholds_and_support(self, config):
        """
        The WiFi operator settles on its datarate peak; the cellular operator alternates
        between keeping its BSs licensed and moving them all to the unlicensed band.

        No pure equilibrium exists here: the cellular best response is delta_c = 1 against
        delta_w = 0.7 and delta_c = 0 against 0.8, and the WiFi peak moves between those two
        values with it. A WiFi-only payoff never picks delta_w in 0.3-0.5, because its
        datarate peaks at 0.6-0.8 for every cellular fraction (see TestRateSurface). The
        time-averaged rates still meet both thresholds.
        """
        loaded = load_scenario(config, ["game.max_activations=400"])
        outcome = run_dbra(loaded.entities, loaded.scenario, loaded.game)
        assert all(outcome.thresholds_met())
        cellular, wifi = outcome.mixed_strategy
        assert {action.delta_c for action in cellular} <= {0.0, 1.0}
        assert {action.delta_w for action in wifi} <= {0.7, 0.8}
        assert sum(wifi.values()) == pytest.approx(1.0)
