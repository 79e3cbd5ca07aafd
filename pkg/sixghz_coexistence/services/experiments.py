"""
Multi-run studies of the two-entity game.

``compare_with_random`` contrasts best-response equilibria with the RANDOM baseline over
random share draws. ``RateCoverageSweep`` collects equilibrium datarates over share draws for
several QoS threshold pairs and reports their empirical rate coverage probability (the CCDF of
the achieved datarate).
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..exceptions import ParameterError
from ..game import evaluate_profile, random_strategy, run_dbra
from ..geometry import Tier
from ..models import Entity, GameConfig, Scenario
from ..streams import RandomStreams
from ..units import bps_to_mbps, mbps_to_bps

logger = logging.getLogger(__name__)

SHARE_MIN = 0.1
SHARE_MAX = 0.9


def draw_two_entities(
    rng: np.random.Generator,
    sigma_hat_c: float,
    sigma_hat_w: float,
    theta_ratio: float,
    share_min: float = SHARE_MIN,
    share_max: float = SHARE_MAX,
) -> List[Entity]:
    """
    Two entities owning complementary random shares of both tiers.

    Both use theta_w = 1 and theta_c = ``theta_ratio``.
    """
    if not 0 <= share_min <= share_max <= 1:
        raise ParameterError(f"Invalid share bounds [{share_min}, {share_max}]")
    v_c, v_w = rng.uniform(share_min, share_max, size=2)
    common = dict(
        sigma_hat_c=sigma_hat_c, sigma_hat_w=sigma_hat_w, theta_c=theta_ratio, theta_w=1.0
    )
    return [
        Entity(v_c=float(v_c), v_w=float(v_w), name="entity-1", **common),
        Entity(v_c=float(1.0 - v_c), v_w=float(1.0 - v_w), name="entity-2", **common),
    ]


def _entity_mean(rates: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    return (
        float(np.mean([rate_c for rate_c, _ in rates])),
        float(np.mean([rate_w for _, rate_w in rates])),
    )


class ComparisonResult:
    """Entity-averaged datarates of D-BRA and RANDOM, one pair per run."""

    def __init__(self):
        self.runs: List[Dict[str, float]] = []
        self.converged = 0

    def add_run(
        self,
        run: int,
        theta_ratio: float,
        dbra: Tuple[float, float],
        random: Tuple[float, float],
        converged: bool,
    ):
        self.runs.append(
            {
                "run": run,
                "theta_ratio": theta_ratio,
                "dbra_rate_c": dbra[0],
                "dbra_rate_w": dbra[1],
                "random_rate_c": random[0],
                "random_rate_w": random[1],
            }
        )
        if converged:
            self.converged += 1
        logger.debug(
            f"Run {run}: D-BRA {bps_to_mbps(dbra[0]):.2f}/{bps_to_mbps(dbra[1]):.2f} Mbps, "
            f"RANDOM {bps_to_mbps(random[0]):.2f}/{bps_to_mbps(random[1]):.2f} Mbps"
        )

    def mean(self, key: str) -> float:
        if not self.runs:
            raise ParameterError("No run recorded")
        return float(np.mean([run[key] for run in self.runs]))

    def improvement(self, tier: Tier) -> float:
        """Relative gain of D-BRA over RANDOM in percent."""
        suffix = "c" if tier == Tier.CELLULAR else "w"
        baseline = self.mean(f"random_rate_{suffix}")
        return 100.0 * (self.mean(f"dbra_rate_{suffix}") - baseline) / baseline

    def summary_rows(self) -> List[Dict[str, object]]:
        rows = []
        for tier, suffix in ((Tier.CELLULAR, "c"), (Tier.WIFI, "w")):
            rows.append(
                {
                    "tier": tier.name.lower(),
                    "dbra_mean_mbps": bps_to_mbps(self.mean(f"dbra_rate_{suffix}")),
                    "random_mean_mbps": bps_to_mbps(self.mean(f"random_rate_{suffix}")),
                    "improvement_pct": self.improvement(tier),
                }
            )
        return rows

    def __str__(self):
        if not self.runs:
            return "D-BRA vs RANDOM: no run"
        return (
            f"D-BRA vs RANDOM: {len(self.runs)} runs ({self.converged} converged), "
            f"cellular {self.improvement(Tier.CELLULAR):+.2f}%, "
            f"WiFi {self.improvement(Tier.WIFI):+.2f}%"
        )


def compare_with_random(
    scenario: Scenario,
    cfg: GameConfig,
    runs: int = 30,
    theta_ratios: Sequence[float] = (5.0, 6.0, 7.0),
    sigma_hat_c: float = mbps_to_bps(30.0),
    sigma_hat_w: float = mbps_to_bps(100.0),
    share_min: float = SHARE_MIN,
    share_max: float = SHARE_MAX,
    threads: int = 1,
) -> ComparisonResult:
    """
    D-BRA against the RANDOM baseline over ``runs`` share draws.

    Run ``r`` uses ``theta_ratios[r % len(theta_ratios)]``. RANDOM draws one action per entity
    and run, uniform on [0.1, 1]. Both strategies are evaluated with the same entities.
    """
    if runs < 1:
        raise ParameterError(f"runs must be >= 1, got {runs}")
    if not theta_ratios:
        raise ParameterError("At least one theta ratio is required")
    streams = RandomStreams(cfg.seed)
    result = ComparisonResult()
    for run in range(runs):
        run_streams = streams.child(run)
        ratio = float(theta_ratios[run % len(theta_ratios)])
        entities = draw_two_entities(
            run_streams.stream("shares"), sigma_hat_c, sigma_hat_w, ratio, share_min, share_max
        )
        outcome = run_dbra(
            entities, scenario, replace(cfg, seed=run_streams.seed), threads=threads
        )
        baseline = random_strategy(entities, run_streams.stream("random-strategy"))
        randomized = [e.with_action(a) for e, a in zip(entities, baseline)]
        result.add_run(
            run,
            ratio,
            _entity_mean(outcome.rates),
            _entity_mean(evaluate_profile(randomized, scenario)),
            outcome.converged,
        )
    logger.info(str(result))
    return result


@dataclass(frozen=True)
class RcpPoint:
    sigma_hat_c: float
    sigma_hat_w: float
    tier: Tier
    rate: float
    probability: float

    def as_row(self) -> Dict[str, object]:
        return {
            "sigma_hat_c_mbps": bps_to_mbps(self.sigma_hat_c),
            "sigma_hat_w_mbps": bps_to_mbps(self.sigma_hat_w),
            "tier": self.tier.name.lower(),
            "rate_mbps": bps_to_mbps(self.rate),
            "rcp": self.probability,
        }


class RateCoverageSweep:
    """Empirical CCDF of equilibrium datarates per QoS threshold pair."""

    def __init__(
        self,
        scenario: Scenario,
        cfg: GameConfig,
        thresholds: Sequence[Tuple[float, float]],
        theta_ratio: float = 7.0,
        draws: int = 20,
        threads: int = 1,
    ):
        """
        Args:
            scenario: Physical parameters
            cfg: Game settings; the seed derives one stream per draw
            thresholds: (sigma_hat_c, sigma_hat_w) pairs in bit/s
            theta_ratio: theta_c / theta_w of both entities
            draws: Share draws (v_c^1, v_w^1) in [0.1, 0.9]² per threshold pair
            threads: Workers of each best response
        """
        if draws < 1:
            raise ParameterError(f"draws must be >= 1, got {draws}")
        if not thresholds:
            raise ParameterError("At least one threshold pair is required")
        self.scenario = scenario
        self.cfg = cfg
        self.thresholds = [tuple(pair) for pair in thresholds]
        self.theta_ratio = theta_ratio
        self.draws = draws
        self.threads = threads

    def collect(self, sigma_hat_c: float, sigma_hat_w: float) -> Dict[Tier, List[float]]:
        """Equilibrium (or time-averaged) datarates of both entities over every draw."""
        streams = RandomStreams(self.cfg.seed)
        samples = {Tier.CELLULAR: [], Tier.WIFI: []}
        for draw in range(self.draws):
            draw_streams = streams.child(draw)
            entities = draw_two_entities(
                draw_streams.stream("shares"), sigma_hat_c, sigma_hat_w, self.theta_ratio
            )
            outcome = run_dbra(
                entities,
                self.scenario,
                replace(self.cfg, seed=draw_streams.seed),
                threads=self.threads,
            )
            for rate_c, rate_w in outcome.rates:
                samples[Tier.CELLULAR].append(rate_c)
                samples[Tier.WIFI].append(rate_w)
        return samples

    def run(self, rate_grid: Sequence[float]) -> List[RcpPoint]:
        """RCP(x) = fraction of collected datarates >= x, for x in ``rate_grid`` (bit/s)."""
        points = []
        for sigma_hat_c, sigma_hat_w in self.thresholds:
            samples = self.collect(sigma_hat_c, sigma_hat_w)
            for tier in (Tier.CELLULAR, Tier.WIFI):
                values = np.asarray(samples[tier])
                for rate in rate_grid:
                    points.append(
                        RcpPoint(
                            sigma_hat_c=sigma_hat_c,
                            sigma_hat_w=sigma_hat_w,
                            tier=tier,
                            rate=float(rate),
                            probability=float(np.mean(values >= rate)),
                        )
                    )
            logger.info(
                f"Thresholds {bps_to_mbps(sigma_hat_c):g}/{bps_to_mbps(sigma_hat_w):g} Mbps: "
                f"{self.draws} draws collected"
            )
        return points
