"""
Spectrum-sharing game between network operators.

Each entity picks the fractions (delta_c^i, delta_w^i) of its eligible BSs and APs that move to
the unlicensed band, on the grid {0, mu, ..., 1}. Its payoff is the weighted sum of the
datarates of the networks it owns, gated by its QoS thresholds. The distributed best-response
dynamics activate one uniformly drawn entity at a time; the activated entity replaces its action
by an exhaustive best response.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analytic import avg_datarate_cellular, avg_datarate_wifi, fraction_grid
from .exceptions import ParameterError
from .models import ActionVector, Entity, GameConfig, Scenario, check_shares
from .streams import RandomStreams

logger = logging.getLogger(__name__)

RANDOM_LOW = 0.1
RANDOM_HIGH = 1.0

# Log a progress line every this many activations
PROGRESS_EVERY = 100


def _profile(entities: Sequence[Entity]) -> Tuple[ActionVector, ...]:
    return tuple(e.action for e in entities)


def _clip_fraction(value: float) -> float:
    return min(1.0, max(0.0, round(value, 12)))


def aggregate_utilization(entities: Sequence[Entity]) -> Tuple[float, float]:
    """Share-weighted sums (sum_j v_c^j delta_c^j, sum_j v_w^j delta_w^j)."""
    delta_c = math.fsum(e.v_c * e.action.delta_c for e in entities)
    delta_w = math.fsum(e.v_w * e.action.delta_w for e in entities)
    return _clip_fraction(delta_c), _clip_fraction(delta_w)


def others_aggregate(entity_index: int, entities: Sequence[Entity]) -> Tuple[float, float]:
    """Aggregate utilization of every entity except ``entity_index``."""
    others = [e for j, e in enumerate(entities) if j != entity_index]
    delta_c = math.fsum(e.v_c * e.action.delta_c for e in others)
    delta_w = math.fsum(e.v_w * e.action.delta_w for e in others)
    return delta_c, delta_w


def qos_indicator(entity: Entity, rate_c: float, rate_w: float) -> int:
    """1 when every network the entity owns reaches its minimum datarate (inclusive)."""
    if entity.v_c > 0 and rate_c < entity.sigma_hat_c:
        return 0
    if entity.v_w > 0 and rate_w < entity.sigma_hat_w:
        return 0
    return 1


class AnalyticRateModel:
    """
    Datarates from the closed-form averages.

    Only the aggregate utilization of the other entities enters the evaluation.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario

    def rates(
        self, entity_index: int, candidate: ActionVector, entities: Sequence[Entity]
    ) -> Tuple[float, float]:
        entity = entities[entity_index]
        others_c, others_w = others_aggregate(entity_index, entities)
        delta_c = _clip_fraction(others_c + entity.v_c * candidate.delta_c)
        delta_w = _clip_fraction(others_w + entity.v_w * candidate.delta_w)
        gamma = self.scenario.gamma
        rate_c = rate_w = 0.0
        if entity.v_c > 0:
            rate_c = avg_datarate_cellular(
                gamma, delta_c, delta_w, candidate.delta_c, self.scenario
            )
        if entity.v_w > 0:
            rate_w = avg_datarate_wifi(gamma, delta_c, delta_w, candidate.delta_w, self.scenario)
        return rate_c, rate_w


class EmpiricalRateModel:
    """Datarates measured on a fixed deployment by an ``EmpiricalRateEvaluator``."""

    def __init__(self, evaluator):
        self.evaluator = evaluator

    def rates(
        self, entity_index: int, candidate: ActionVector, entities: Sequence[Entity]
    ) -> Tuple[float, float]:
        profile = list(_profile(entities))
        profile[entity_index] = candidate
        return self.evaluator.rates(profile)[entity_index]


@dataclass(frozen=True)
class PayoffResult:
    value: float
    rate_c: float
    rate_w: float
    qualified: int


def payoff(
    entity_index: int,
    candidate: ActionVector,
    entities: Sequence[Entity],
    scenario: Scenario,
    rate_model=None,
) -> PayoffResult:
    """
    QoS-gated payoff of ``entity_index`` playing ``candidate`` against the others' actions.

    value = 1{thresholds met} · (theta_c·sigma_c·1{v_c > 0} + theta_w·sigma_w·1{v_w > 0})
    """
    if rate_model is None:
        rate_model = AnalyticRateModel(scenario)
    entity = entities[entity_index]
    rate_c, rate_w = rate_model.rates(entity_index, candidate, entities)
    qualified = qos_indicator(entity, rate_c, rate_w)
    value = 0.0
    if qualified:
        if entity.v_c > 0:
            value += entity.theta_c * rate_c
        if entity.v_w > 0:
            value += entity.theta_w * rate_w
    return PayoffResult(value=value, rate_c=rate_c, rate_w=rate_w, qualified=qualified)


def action_grid(mu: float) -> List[ActionVector]:
    """All (1/mu + 1)² actions, delta_c-major."""
    values = fraction_grid(mu)
    return [ActionVector(dc, dw) for dc in values for dw in values]


def _best_response(
    entity_index: int,
    entities: Sequence[Entity],
    scenario: Scenario,
    mu: float,
    rate_model=None,
    threads: int = 1,
) -> Tuple[ActionVector, PayoffResult]:
    if rate_model is None:
        rate_model = AnalyticRateModel(scenario)
    grid = action_grid(mu)

    def evaluate(candidate):
        return payoff(entity_index, candidate, entities, scenario, rate_model)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, grid))
    else:
        results = [evaluate(candidate) for candidate in grid]

    best_index = 0
    for index, result in enumerate(results):
        if result.value > results[best_index].value:
            best_index = index

    current = entities[entity_index].action
    for candidate, result in zip(grid, results):
        if candidate == current and result.value >= results[best_index].value:
            return current, result
    return grid[best_index], results[best_index]


def best_response(
    entity_index: int,
    entities: Sequence[Entity],
    scenario: Scenario,
    mu: float,
    rate_model=None,
    threads: int = 1,
) -> ActionVector:
    """
    Exhaustive best response on the action grid.

    Ties keep the entity's current action when it attains the maximum; otherwise the
    lexicographically lowest (delta_c, delta_w) maximizer wins.
    """
    action, _ = _best_response(entity_index, entities, scenario, mu, rate_model, threads)
    return action


def next_actor(n_entities: int, rng: np.random.Generator) -> int:
    """Index of the next entity to act, uniform over all entities."""
    if n_entities < 1:
        raise ParameterError(f"At least one entity is required, got {n_entities}")
    return int(rng.integers(n_entities))


def random_strategy(
    entities: Sequence[Entity],
    rng: np.random.Generator,
    low: float = RANDOM_LOW,
    high: float = RANDOM_HIGH,
) -> List[ActionVector]:
    """One action per entity, both fractions uniform on [low, high] and not grid-snapped."""
    draws = rng.uniform(low, high, size=(len(entities), 2))
    return [ActionVector(float(dc), float(dw)) for dc, dw in draws]


def evaluate_profile(
    entities: Sequence[Entity], scenario: Scenario, rate_model=None
) -> List[Tuple[float, float]]:
    """(sigma_c^i, sigma_w^i) of every entity under its current action."""
    if rate_model is None:
        rate_model = AnalyticRateModel(scenario)
    return [rate_model.rates(i, e.action, entities) for i, e in enumerate(entities)]


@dataclass(frozen=True)
class GameRecord:
    """One activation: the actor's choice and the resulting profile and rates."""

    activation: int
    actor: int
    action: ActionVector
    payoff: float
    rate_c: float
    rate_w: float
    agg_delta_c: float
    agg_delta_w: float
    profile: Tuple[ActionVector, ...]
    rates: Tuple[Tuple[float, float], ...]

    def as_row(self) -> Dict[str, object]:
        return {
            "activation": self.activation,
            "actor": self.actor,
            "delta_c_i": self.action.delta_c,
            "delta_w_i": self.action.delta_w,
            "payoff": self.payoff,
            "rate_c": self.rate_c,
            "rate_w": self.rate_w,
            "agg_delta_c": self.agg_delta_c,
            "agg_delta_w": self.agg_delta_w,
        }


TRACE_COLUMNS = [
    "activation",
    "actor",
    "delta_c_i",
    "delta_w_i",
    "payoff",
    "rate_c",
    "rate_w",
    "agg_delta_c",
    "agg_delta_w",
]


@dataclass
class GameTrace:
    initial_profile: Tuple[ActionVector, ...]
    records: List[GameRecord] = field(default_factory=list)

    def append(self, record: GameRecord):
        if not 0 <= record.actor < len(self.initial_profile):
            raise ParameterError(f"Invalid actor index {record.actor}")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def n_entities(self) -> int:
        return len(self.initial_profile)

    def rows(self) -> List[Dict[str, object]]:
        return [record.as_row() for record in self.records]


def empirical_mixed_strategy(trace: GameTrace, burn_in: int) -> List[Dict[ActionVector, float]]:
    """
    Visit frequencies of every entity's actions over the records after ``burn_in``.

    Raises:
        ParameterError: If nothing is left after the burn-in
    """
    if burn_in < 0:
        raise ParameterError(f"burn_in must be >= 0, got {burn_in}")
    tail = trace.records[burn_in:]
    if not tail:
        raise ParameterError(
            f"No record after a burn-in of {burn_in} (trace has {len(trace)} records)"
        )
    strategies = []
    for index in range(trace.n_entities):
        counts = Counter(record.profile[index] for record in tail)
        total = sum(counts.values())
        strategies.append(
            {action: count / total for action, count in sorted(counts.items(), key=_action_key)}
        )
    return strategies


def _action_key(item):
    action, _ = item
    return action.as_tuple()


def verify_equilibrium(
    entities: Sequence[Entity],
    scenario: Scenario,
    mu: float,
    rate_model=None,
    threads: int = 1,
) -> List[int]:
    """Indices of the entities whose best response differs from their current action."""
    deviating = []
    for index, entity in enumerate(entities):
        response = best_response(index, entities, scenario, mu, rate_model, threads)
        if response != entity.action:
            logger.info(f"{entity.label} would deviate from {entity.action} to {response}")
            deviating.append(index)
    return deviating


class GameRunResult:
    """Activation counters of one best-response run."""

    def __init__(self, n_entities: int):
        self.n_entities = n_entities
        self.activations = 0
        self.changes = 0
        self.unqualified = 0
        self.converged = False

    def add_activation(self, record: GameRecord, changed: bool, qualified: int):
        self.activations += 1
        if changed:
            self.changes += 1
        if not qualified:
            self.unqualified += 1
            logger.debug(f"Activation {record.activation}: entity {record.actor} unqualified")
        if self.activations % PROGRESS_EVERY == 0:
            logger.info(f"{self.activations} activations, {self.changes} action changes")

    def __str__(self):
        state = "converged" if self.converged else "not terminated"
        return (
            f"Game Result: {state} after {self.activations} activations, "
            f"{self.changes} action changes, {self.unqualified} unqualified best responses"
        )


@dataclass(frozen=True)
class GameOutcome:
    """
    Final state of a run.

    ``rates`` holds the equilibrium rates of a converged run, or the post-burn-in time average
    of every entity's rates otherwise. ``mixed_strategy`` is the post-burn-in visit frequency
    table (a point mass for a converged run that ends in its equilibrium).
    """

    trace: GameTrace
    converged: bool
    entities: Tuple[Entity, ...]
    rates: Tuple[Tuple[float, float], ...]
    mixed_strategy: List[Dict[ActionVector, float]]
    burn_in: int
    summary: GameRunResult

    @property
    def profile(self) -> Tuple[ActionVector, ...]:
        return _profile(self.entities)

    def thresholds_met(self) -> List[bool]:
        return [
            bool(qos_indicator(entity, rate_c, rate_w))
            for entity, (rate_c, rate_w) in zip(self.entities, self.rates)
        ]


class BestResponseDynamics:
    """Distributed best-response dynamics with uniformly random actor activation."""

    def __init__(
        self,
        entities: Sequence[Entity],
        scenario: Scenario,
        cfg: GameConfig,
        rate_model=None,
        threads: int = 1,
    ):
        """
        Args:
            entities: Players; their actions are replaced by the initial profile
            scenario: Physical parameters
            cfg: Grid step, tolerance, activation budget and seed
            rate_model: Datarate source, analytic by default
            threads: Workers evaluating the candidates of one best response
        """
        check_shares(entities)
        self.entities = list(entities)
        self.scenario = scenario
        self.cfg = cfg
        self.rate_model = rate_model or AnalyticRateModel(scenario)
        self.threads = max(1, int(threads))
        self.streams = RandomStreams(cfg.seed)
        self.grid = fraction_grid(cfg.mu)

    def initial_profile(self) -> List[ActionVector]:
        """Uniformly random grid action for every entity."""
        rng = self.streams.stream("initial-actions")
        picks = rng.integers(len(self.grid), size=(len(self.entities), 2))
        return [ActionVector(self.grid[c], self.grid[w]) for c, w in picks]

    def run(self, initial: Optional[Sequence[ActionVector]] = None) -> GameOutcome:
        n = len(self.entities)
        budget = self.cfg.activation_budget(n)
        initial = list(initial) if initial is not None else self.initial_profile()
        if len(initial) != n:
            raise ParameterError(f"Initial profile has {len(initial)} actions for {n} entities")
        entities = [e.with_action(a) for e, a in zip(self.entities, initial)]
        actors = self.streams.stream("actor")

        trace = GameTrace(initial_profile=tuple(initial))
        summary = GameRunResult(n)
        last_delta = [math.inf] * n
        pending = set(range(n))
        logger.info(f"Starting best-response dynamics: {n} entities, budget {budget}")

        for activation in range(budget):
            actor = next_actor(n, actors)
            previous = entities[actor].action
            action, result = _best_response(
                actor, entities, self.scenario, self.cfg.mu, self.rate_model, self.threads
            )
            entities[actor] = entities[actor].with_action(action)
            last_delta[actor] = action.distance(previous)
            changed = last_delta[actor] > self.cfg.epsilon
            if changed:
                pending = set(range(n))
            else:
                pending.discard(actor)

            agg_c, agg_w = aggregate_utilization(entities)
            record = GameRecord(
                activation=activation,
                actor=actor,
                action=action,
                payoff=result.value,
                rate_c=result.rate_c,
                rate_w=result.rate_w,
                agg_delta_c=agg_c,
                agg_delta_w=agg_w,
                profile=_profile(entities),
                rates=tuple(evaluate_profile(entities, self.scenario, self.rate_model)),
            )
            trace.append(record)
            summary.add_activation(record, changed, result.qualified)

            if (
                self.cfg.stop_on_convergence
                and not pending
                and math.fsum(last_delta) <= self.cfg.epsilon
            ):
                summary.converged = True
                break

        burn_in = 0 if summary.converged else int(self.cfg.burn_in_fraction * len(trace))
        if summary.converged:
            rates = trace.records[-1].rates
            mixed = [{action: 1.0} for action in trace.records[-1].profile]
        else:
            tail = trace.records[burn_in:]
            rates = tuple(
                (
                    float(np.mean([r.rates[i][0] for r in tail])),
                    float(np.mean([r.rates[i][1] for r in tail])),
                )
                for i in range(n)
            )
            mixed = empirical_mixed_strategy(trace, burn_in)
        logger.info(str(summary))
        return GameOutcome(
            trace=trace,
            converged=summary.converged,
            entities=tuple(entities),
            rates=tuple(rates),
            mixed_strategy=mixed,
            burn_in=burn_in,
            summary=summary,
        )


def run_dbra(
    entities: Sequence[Entity],
    scenario: Scenario,
    cfg: GameConfig,
    rate_model=None,
    threads: int = 1,
    initial: Optional[Sequence[ActionVector]] = None,
) -> GameOutcome:
    """Run the distributed best-response dynamics from a random (or given) grid profile."""
    return BestResponseDynamics(entities, scenario, cfg, rate_model, threads).run(initial)
