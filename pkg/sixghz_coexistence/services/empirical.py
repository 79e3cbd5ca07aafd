"""
Empirical datarates on a fixed deployment.

Used by the case-study game, where transmitter positions come from geodata instead of a point
process. Users are dropped once: cellular users uniformly over the study area, WiFi users as a
Matérn cluster around their entity's APs. For an action profile the bands are re-thresholded
against uniforms drawn once per transmitter, so every profile is evaluated on the same
randomness. A cellular user is served in the unlicensed band when its own uniform is below its
entity's cellular fraction, and attaches to the nearest BS of its entity in that band.

A user's success probability is the exact Rayleigh expectation given the geometry,
exp(-γκ²/S) · Π_j 1/(1 + γ I_j/S), so no fading draws are involved.
"""

import logging
import math
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from ..exceptions import GeodataError, ParameterError
from ..geometry import (
    MIN_SEPARATION,
    Band,
    Deployment,
    Tier,
    assign_bands,
    sample_matern_users,
    sample_uniform_users,
)
from ..models import ActionVector, Entity, Scenario, Window
from ..radio import NoiseModel, tier_powers
from ..streams import RandomStreams

logger = logging.getLogger(__name__)

EntityRates = Tuple[float, float]
ProfileKey = Tuple[Tuple[float, float], ...]

DEFAULT_CACHE_SIZE = 4096


class EmpiricalRateEvaluator:
    """Per-entity average datarates of a fixed deployment under any action profile."""

    def __init__(
        self,
        deployment: Deployment,
        scenario: Scenario,
        entities: Sequence[Entity],
        n_users: int,
        streams: RandomStreams,
        user_region: Optional[Window] = None,
        cache_size: int = DEFAULT_CACHE_SIZE,
    ):
        """
        Args:
            deployment: Transmitters with tier, owner and in_zone tags (incumbents included)
            scenario: Powers, bandwidths, path loss, noise and threshold
            entities: Game entities; indices match ``deployment.owner``
            n_users: Users dropped per entity and owned tier
            streams: Source of the user positions and band-split uniforms
            user_region: Disk for cellular users, by default the smallest origin-centered disk
                holding every transmitter
            cache_size: Action profiles whose rates are kept; the least recently used goes first

        Raises:
            ParameterError: If ``n_users`` < 1
            GeodataError: If an entity owns a share of a tier but no element of it
        """
        if n_users < 1:
            raise ParameterError(f"n_users must be >= 1, got {n_users}")
        if not len(deployment):
            raise GeodataError("Deployment is empty")

        self.deployment = deployment
        self.scenario = scenario
        self.entities = list(entities)
        self.n_users = int(n_users)
        self.spectral_efficiency = math.log2(1.0 + scenario.gamma)
        self._cached_rates = lru_cache(maxsize=cache_size)(self._entity_rates)

        if user_region is None:
            user_region = Window(max(float(np.max(deployment.distances())), 1.0))
        self.user_region = user_region

        self._drop_users(streams)
        self._precompute_gains()
        self.uniforms = streams.stream("band-split").random(len(deployment))
        self.user_uniforms = streams.stream("user-bands").random(len(self.user_home))
        logger.info(
            f"Empirical evaluator ready: {len(deployment)} transmitters, "
            f"{len(self.user_home)} users"
        )

    def _drop_users(self, streams: RandomStreams):
        positions, homes, owners, tiers = [], [], [], []
        for index, entity in enumerate(self.entities):
            if entity.v_c > 0:
                owned = np.flatnonzero(self.deployment.mask(tier=Tier.CELLULAR, owner=index))
                if not len(owned):
                    raise GeodataError(
                        f"Entity '{entity.label}' owns a cellular share but no base station"
                    )
                xy = sample_uniform_users(
                    self.user_region, self.n_users, streams.stream("cellular-users", index)
                )
                # nearest own BS over both bands; attachments() narrows it to the served band
                _, nearest = cKDTree(self.deployment.xy[owned]).query(xy, k=1)
                positions.append(xy)
                homes.append(owned[nearest])
                owners.append(np.full(self.n_users, index))
                tiers.append(np.full(self.n_users, int(Tier.CELLULAR)))
            if entity.v_w > 0:
                owned = np.flatnonzero(self.deployment.mask(tier=Tier.WIFI, owner=index))
                if not len(owned):
                    raise GeodataError(
                        f"Entity '{entity.label}' owns a WiFi share but no access point"
                    )
                xy, parent = sample_matern_users(
                    self.deployment.subset(owned),
                    self.n_users,
                    self.scenario.rho_w,
                    streams.stream("wifi-users", index),
                )
                positions.append(xy)
                homes.append(owned[parent])
                owners.append(np.full(self.n_users, index))
                tiers.append(np.full(self.n_users, int(Tier.WIFI)))

        if not positions:
            raise GeodataError("No entity owns a share of any tier")
        self.user_xy = np.concatenate(positions)
        self.user_home = np.concatenate(homes)
        self.user_owner = np.concatenate(owners)
        self.user_tier = np.concatenate(tiers)

    def _precompute_gains(self):
        scenario = self.scenario
        powers = tier_powers(scenario)
        p_tx = np.choose(self.deployment.tier, [powers[t] for t in Tier])
        self.distance = np.maximum(cdist(self.user_xy, self.deployment.xy), MIN_SEPARATION)
        self.gains = p_tx[np.newaxis, :] * self.distance**-scenario.alpha
        noise = NoiseModel.of(scenario)
        self.noise_power = np.where(
            self.user_tier == Tier.CELLULAR,
            noise.for_tier(Tier.CELLULAR),
            noise.for_tier(Tier.WIFI),
        )

    def _bands(self, profile: Sequence[ActionVector]) -> np.ndarray:
        deployment = self.deployment
        delta = np.zeros(len(deployment))
        for index, action in enumerate(profile):
            delta[deployment.mask(tier=Tier.CELLULAR, owner=index)] = action.delta_c
            delta[deployment.mask(tier=Tier.WIFI, owner=index)] = action.delta_w
        return assign_bands(deployment, delta, self.uniforms).band

    def attachments(self, profile: Sequence[ActionVector]) -> Tuple[np.ndarray, np.ndarray]:
        """
        Serving transmitter of every user and the band of every transmitter under ``profile``.

        A cellular user whose band holds no BS of its entity falls back to the other band.
        """
        band = self._bands(profile)
        home = self.user_home.copy()
        cellular = np.flatnonzero(self.user_tier == Tier.CELLULAR)
        if len(cellular):
            owner = self.user_owner[cellular]
            delta_c = np.array([action.delta_c for action in profile])
            wanted = np.where(
                self.user_uniforms[cellular] < delta_c[owner],
                int(Band.UNLICENSED),
                int(Band.LICENSED),
            )
            deployment = self.deployment
            owned = (deployment.tier == Tier.CELLULAR)[np.newaxis, :] & (
                deployment.owner[np.newaxis, :] == owner[:, np.newaxis]
            )
            in_band = owned & (band[np.newaxis, :] == wanted[:, np.newaxis])
            candidates = np.where(in_band.any(axis=1)[:, np.newaxis], in_band, owned)
            home[cellular] = np.argmin(
                np.where(candidates, self.distance[cellular], np.inf), axis=1
            )
        return home, band

    def user_rates(self, profile: Sequence[ActionVector]) -> np.ndarray:
        """Average datarate (bit/s) of every dropped user."""
        if len(profile) != len(self.entities):
            raise ParameterError(
                f"Profile has {len(profile)} actions for {len(self.entities)} entities"
            )
        scenario = self.scenario
        tier = self.deployment.tier
        home, band = self.attachments(profile)
        serving = self.gains[np.arange(len(home)), home]
        # log(1 + γ I_j / S) per user and transmitter; the serving column equals log(1 + γ)
        log_penalty = np.log1p(scenario.gamma * self.gains / serving[:, np.newaxis])
        unlicensed_set = (band == Band.UNLICENSED) | (tier == Tier.INCUMBENT)
        licensed_c = (tier == Tier.CELLULAR) & (band == Band.LICENSED)
        licensed_w = (tier == Tier.WIFI) & (band == Band.LICENSED)

        home_band = band[home]
        is_cellular = self.user_tier == Tier.CELLULAR
        penalty = np.where(
            home_band == Band.UNLICENSED,
            log_penalty @ unlicensed_set.astype(float),
            np.where(
                is_cellular,
                log_penalty @ licensed_c.astype(float),
                log_penalty @ licensed_w.astype(float),
            ),
        )
        penalty -= math.log1p(scenario.gamma)
        noise_penalty = scenario.gamma * self.noise_power / serving
        success = np.exp(-noise_penalty - np.maximum(penalty, 0.0))
        bandwidth = np.where(
            home_band == Band.UNLICENSED,
            scenario.b_u,
            np.where(is_cellular, scenario.b_cl, scenario.b_wl),
        )
        return bandwidth * self.spectral_efficiency * success

    def rates(self, profile: Sequence[ActionVector]) -> List[EntityRates]:
        """(cellular, WiFi) average datarate of every entity; 0 for a tier it does not own."""
        return self._cached_rates(tuple(action.as_tuple() for action in profile))

    def cache_info(self):
        return self._cached_rates.cache_info()

    def _entity_rates(self, key: ProfileKey) -> List[EntityRates]:
        user_rates = self.user_rates([ActionVector(*pair) for pair in key])
        result = []
        for index in range(len(self.entities)):
            mine = self.user_owner == index
            cellular = user_rates[mine & (self.user_tier == Tier.CELLULAR)]
            wifi = user_rates[mine & (self.user_tier == Tier.WIFI)]
            result.append(
                (
                    float(cellular.mean()) if len(cellular) else 0.0,
                    float(wifi.mean()) if len(wifi) else 0.0,
                )
            )
        logger.debug(f"Empirical rates for {key}: {result}")
        return result


def simulate_datarate_empirical(
    deployment: Deployment,
    scenario: Scenario,
    entities: Sequence[Entity],
    action_profile: Sequence[ActionVector],
    n_users: int,
    streams: RandomStreams,
) -> List[EntityRates]:
    """One-shot version of ``EmpiricalRateEvaluator.rates``."""
    evaluator = EmpiricalRateEvaluator(deployment, scenario, entities, n_users, streams)
    return evaluator.rates(action_profile)
