"""
Monte Carlo coverage oracle.

Samples full network realizations (incumbents, exclusion zones, both tiers, band split) around
a typical user at the origin and counts how often its SINR clears each threshold. One SINR
sample per realization is compared against the whole threshold grid.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.stats import norm

from ..analytic import band_intensity
from ..exceptions import DegenerateTierError, RedrawBudgetExceeded
from ..geometry import (
    MIN_SEPARATION,
    Band,
    Deployment,
    ExclusionZones,
    Tier,
    assign_bands,
    flag_exclusion_zones,
    sample_ppp,
    sample_wifi_serving_distance,
)
from ..models import McConfig, Scenario
from ..radio import (
    aggregate_interference,
    associate_nearest,
    associate_wifi,
    signal_power,
    sinr,
    tier_powers,
)
from ..streams import RandomStreams
from ..units import db_to_linear

logger = logging.getLogger(__name__)

CONFIDENCE = 0.99


@dataclass(frozen=True)
class CoverageEstimate:
    """Empirical coverage at one threshold, with its Wilson 99% interval."""

    gamma_db: float
    p_hat: float
    ci99: float
    ci_low: float
    ci_high: float
    n: int

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.ci_low - slack <= value <= self.ci_high + slack


def wilson_interval(successes: int, n: int, confidence: float = CONFIDENCE):
    """
    Wilson score interval of a binomial proportion.

    Returns:
        tuple: (low, high, half-width)
    """
    if n < 1:
        raise ValueError("Wilson interval needs at least one trial")
    z = norm.ppf(0.5 + confidence / 2.0)
    p = successes / n
    denominator = 1.0 + z**2 / n
    center = (p + z**2 / (2 * n)) / denominator
    half_width = z * math.sqrt(p * (1 - p) / n + z**2 / (4 * n**2)) / denominator
    return max(center - half_width, 0.0), min(center + half_width, 1.0), half_width


class CoverageTally:
    """Success counts of one tier/band curve."""

    def __init__(self, gamma_db_grid: Sequence[float]):
        self.gamma_db_grid = tuple(gamma_db_grid)
        self.thresholds = np.array([db_to_linear(g) for g in self.gamma_db_grid])
        self.successes = np.zeros(len(self.thresholds), dtype=np.int64)
        self.realizations = 0
        self.redraws = 0

    def add_realization(self, sinr_value: float):
        self.realizations += 1
        self.successes += sinr_value > self.thresholds

    def add_redraws(self, count: int):
        if count:
            self.redraws += count
            logger.debug(f"{count} realization(s) redrawn (no eligible serving node)")

    def merge(self, other: "CoverageTally"):
        self.realizations += other.realizations
        self.redraws += other.redraws
        self.successes += other.successes

    def estimates(self) -> List[CoverageEstimate]:
        estimates = []
        for gamma_db, successes in zip(self.gamma_db_grid, self.successes):
            low, high, half_width = wilson_interval(int(successes), self.realizations)
            estimates.append(
                CoverageEstimate(
                    gamma_db=gamma_db,
                    p_hat=successes / self.realizations,
                    ci99=half_width,
                    ci_low=low,
                    ci_high=high,
                    n=self.realizations,
                )
            )
        return estimates

    def __str__(self):
        return (
            f"Coverage tally: {self.realizations} realizations, {self.redraws} redrawn, "
            f"{len(self.thresholds)} thresholds"
        )


class CoverageSimulator:
    """Runs Monte Carlo coverage curves for one scenario."""

    def __init__(self, scenario: Scenario, mc: McConfig, threads: int = 1):
        """
        Args:
            scenario: Physical parameters
            mc: Realization count, window, seed and threshold grid
            threads: Worker threads; results do not depend on it
        """
        self.scenario = scenario
        self.mc = mc
        self.threads = max(1, int(threads))
        self.streams = RandomStreams(mc.seed)
        self.powers = tier_powers(scenario)

    def simulate(
        self, tier: Tier, band: Band, delta_c: float, delta_w: float
    ) -> List[CoverageEstimate]:
        """
        Coverage curve of the typical ``tier`` user served in ``band``.

        Raises:
            DegenerateTierError: If the serving tier has no transmitter in ``band``
            RedrawBudgetExceeded: If a realization keeps lacking a serving node
        """
        if not band_intensity(tier, band, self.scenario, delta_c, delta_w) > 0:
            raise DegenerateTierError(f"No {tier.name.lower()} transmitter in {band.name.lower()}")

        indices = np.arange(self.mc.n_realizations)
        chunks = [c for c in np.array_split(indices, self.threads) if len(c)]
        if len(chunks) == 1:
            tallies = [self._run_chunk(chunks[0], tier, band, delta_c, delta_w)]
        else:
            with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
                tallies = list(
                    pool.map(lambda c: self._run_chunk(c, tier, band, delta_c, delta_w), chunks)
                )

        tally = CoverageTally(self.mc.gamma_db_grid)
        for part in tallies:
            tally.merge(part)
        logger.info(f"{tier.name.lower()}/{band.name.lower()}: {tally}")
        return tally.estimates()

    def _run_chunk(self, indices, tier, band, delta_c, delta_w) -> CoverageTally:
        tally = CoverageTally(self.mc.gamma_db_grid)
        for index in indices:
            for attempt in range(self.mc.redraw_factor):
                value = self._realization(int(index), attempt, tier, band, delta_c, delta_w)
                if value is not None:
                    tally.add_redraws(attempt)
                    tally.add_realization(value)
                    break
            else:
                raise RedrawBudgetExceeded(
                    f"Realization {index}: no serving node after {self.mc.redraw_factor} draws"
                )
        return tally

    def _realization(self, index, attempt, tier, band, delta_c, delta_w) -> Optional[float]:
        """SINR of the typical user in one realization, or None when it cannot associate."""
        scenario = self.scenario
        window = self.mc.window
        streams = self.streams

        incumbents = sample_ppp(
            scenario.lambda_z,
            window.inflated(scenario.rho),
            streams.stream("incumbent", index, attempt),
            Tier.INCUMBENT,
        )
        zones = ExclusionZones.around(incumbents, scenario.rho)
        cellular = flag_exclusion_zones(
            sample_ppp(scenario.lambda_c, window, streams.stream("cellular", index, attempt)),
            zones,
        )
        wifi = flag_exclusion_zones(
            sample_ppp(
                scenario.lambda_w, window, streams.stream("wifi", index, attempt), Tier.WIFI
            ),
            zones,
        )
        split_c = streams.stream("band-split-cellular", index, attempt)
        cellular = assign_bands(cellular, delta_c, split_c.random(len(cellular)))
        wifi = assign_bands(
            wifi, delta_w, streams.stream("band-split-wifi", index, attempt).random(len(wifi))
        )

        if tier == Tier.CELLULAR:
            candidates = cellular.where(band=band)
            serving = associate_nearest(candidates)
            if serving is None:
                return None
            distance = candidates.distances()[serving]
            others = candidates.subset(np.arange(len(candidates)) != serving)
            if band == Band.UNLICENSED:
                interferers = Deployment.concatenate(
                    [others, wifi.where(band=Band.UNLICENSED), incumbents]
                )
            else:
                interferers = others
            p_tx, noise = scenario.p_c, scenario.noise_c
        else:
            serving_rng = streams.stream("serving", index, attempt)
            same_band = wifi.where(band=band)
            if self.mc.wifi_association == "in-range":
                serving = associate_wifi(same_band, scenario.rho_w, serving_rng)
                if serving is None:
                    return None
                distance = same_band.distances()[serving]
                same_band = same_band.subset(np.arange(len(same_band)) != serving)
            else:
                # Serving AP added at a distance drawn from the range distribution; the other
                # APs of the band stay a full point process.
                distance = max(
                    float(sample_wifi_serving_distance(scenario.rho_w, serving_rng)),
                    MIN_SEPARATION,
                )
                angle = serving_rng.random() * 2.0 * math.pi
                position = (distance * math.cos(angle), distance * math.sin(angle))
                if band == Band.UNLICENSED and zones.contains([position])[0]:
                    return None
            if band == Band.UNLICENSED:
                interferers = Deployment.concatenate(
                    [cellular.where(band=Band.UNLICENSED), same_band, incumbents]
                )
            else:
                interferers = same_band
            p_tx, noise = scenario.p_w, scenario.noise_w

        fading_rng = streams.stream("fading", index, attempt)
        signal = signal_power(p_tx, distance, scenario.alpha, fading_rng.exponential(1.0))
        interference = aggregate_interference(interferers, scenario.alpha, fading_rng, self.powers)
        return sinr(signal, interference, noise)


def simulate_coverage(
    scenario: Scenario,
    tier: Tier,
    band: Band,
    delta_c: float,
    delta_w: float,
    mc: McConfig,
    threads: int = 1,
) -> List[CoverageEstimate]:
    """Monte Carlo coverage curve of one tier/band pair over ``mc.gamma_db_grid``."""
    return CoverageSimulator(scenario, mc, threads=threads).simulate(tier, band, delta_c, delta_w)
