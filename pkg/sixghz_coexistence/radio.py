"""
Per-link radio model.

Received power p·H·d^-α with unit-mean exponential (Rayleigh power) fading H, aggregate
interference over a point set, SINR, and the serving-node association rules.
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .exceptions import DivergenceError, DomainError, ParameterError
from .geometry import Deployment, Tier
from .models import Scenario

logger = logging.getLogger(__name__)


def check_path_loss(alpha: float):
    """Interference from a PPP on the plane is finite only for alpha > 2."""
    if not alpha > 2:
        raise DivergenceError(f"Path-loss exponent must exceed 2, got {alpha}")


@dataclass(frozen=True)
class LinkParams:
    p_tx: float
    alpha: float = 4.0

    def __post_init__(self):
        if not self.p_tx > 0:
            raise ParameterError(f"Transmit power must be > 0, got {self.p_tx}")
        check_path_loss(self.alpha)


@dataclass(frozen=True)
class NoiseModel:
    noise_c: float = 0.0
    noise_w: float = 0.0

    def __post_init__(self):
        if self.noise_c < 0 or self.noise_w < 0:
            raise ParameterError("Noise powers must be >= 0")

    @classmethod
    def of(cls, scenario: Scenario) -> "NoiseModel":
        return cls(scenario.noise_c, scenario.noise_w)

    def for_tier(self, tier: Tier) -> float:
        return self.noise_c if tier == Tier.CELLULAR else self.noise_w


def tier_powers(scenario: Scenario) -> Mapping[Tier, float]:
    return {Tier.CELLULAR: scenario.p_c, Tier.WIFI: scenario.p_w, Tier.INCUMBENT: scenario.p_z}


def signal_power(p_tx, distance, alpha: float, fading=1.0):
    """
    Received power p_tx · H · distance^-alpha.

    Works element-wise on arrays.

    Raises:
        DomainError: If any distance is not strictly positive
    """
    distance = np.asarray(distance, dtype=float)
    if np.any(~(distance > 0)):
        raise DomainError("Link distance must be > 0 (transmitter on top of the receiver)")
    power = np.asarray(p_tx, dtype=float) * np.asarray(fading, dtype=float) * distance**-alpha
    return float(power) if power.ndim == 0 else power


def aggregate_interference(
    interferers: Deployment,
    alpha: float,
    rng: np.random.Generator,
    powers: Mapping[Tier, float],
    receiver=(0.0, 0.0),
) -> float:
    """
    Sum of faded received powers from every interferer.

    The caller removes the serving node beforehand.

    Args:
        interferers: Interfering transmitters
        alpha: Path-loss exponent
        rng: Fading generator; one exponential draw per interferer
        powers: Transmit power per tier
        receiver: Receiver position

    Returns:
        float: Interference power in W, 0 for an empty set
    """
    check_path_loss(alpha)
    if not len(interferers):
        return 0.0
    p_tx = np.choose(interferers.tier, [powers[t] for t in Tier])
    fading = rng.exponential(1.0, size=len(interferers))
    return float(np.sum(signal_power(p_tx, interferers.distances(receiver), alpha, fading)))


def sinr(signal, interference, noise):
    """
    signal / (noise + interference).

    A zero denominator gives +inf for a positive signal; a zero signal always gives 0.

    Raises:
        ParameterError: On negative inputs
    """
    signal = np.asarray(signal, dtype=float)
    interference = np.asarray(interference, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if np.any(signal < 0) or np.any(interference < 0) or np.any(noise < 0):
        raise ParameterError("Signal, interference and noise must be >= 0")
    denominator = noise + interference
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(signal > 0, signal / denominator, 0.0)
    return float(ratio) if ratio.ndim == 0 else ratio


def rayleigh_success_probability(serving_mean, interferer_means, noise: float, gamma: float):
    """
    P(SINR > gamma) given the geometry, averaged over Rayleigh fading.

    exp(-gamma·noise/S) · prod_j 1 / (1 + gamma·I_j/S), where S and I_j are the unfaded
    received powers of the serving node and of each interferer.
    """
    serving_mean = float(serving_mean)
    if not serving_mean > 0:
        return 0.0
    interferer_means = np.asarray(interferer_means, dtype=float)
    penalty = np.sum(np.log1p(gamma * interferer_means / serving_mean))
    return float(np.exp(-gamma * noise / serving_mean - penalty))


def associate_nearest(candidates: Deployment, receiver=(0.0, 0.0)) -> Optional[int]:
    """Index of the nearest candidate, or None when there is none."""
    if not len(candidates):
        return None
    return int(np.argmin(candidates.distances(receiver)))


def associate_wifi(
    candidates: Deployment,
    rho_w: float,
    rng: np.random.Generator,
    receiver=(0.0, 0.0),
) -> Optional[int]:
    """Uniformly random candidate within ``rho_w`` of the receiver, or None."""
    in_range = np.flatnonzero(candidates.distances(receiver) <= rho_w)
    if not len(in_range):
        return None
    return int(rng.choice(in_range))
