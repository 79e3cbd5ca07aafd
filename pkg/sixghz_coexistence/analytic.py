"""
Closed-form performance model.

Coverage probabilities of the typical cellular and WiFi user in the licensed and
unlicensed bands, the Laplace transforms of the interference they see, and the average
datarate of an entity's users. Inputs are SI-linear; the SINR threshold is a linear ratio.

Semi-infinite radial integrals are evaluated with adaptive quadrature after the
substitution u = r², scaled so the integrand is exp(-t - c·t^(α/2)). The finite WiFi
integrals over the AP range use a fixed high-order Gauss-Legendre rule.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import fixed_quad, quad

from .exceptions import DegenerateTierError, DivergenceError, ParameterError
from .geometry import Band, Tier
from .models import Scenario

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-9
ZETA_EPSREL = 1e-11
GAUSS_LEGENDRE_ORDER = 96


def sinc(x: float) -> float:
    """Normalized sinc, sin(pi x)/(pi x)."""
    return float(np.sinc(x))


def _check_fraction(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")


def _check_gamma(gamma: float):
    if not gamma > 0:
        raise ParameterError(f"SINR threshold must be > 0, got {gamma}")


@lru_cache(maxsize=1024)
def zeta(gamma: float, alpha: float) -> float:
    """
    (gamma^(2/alpha) / 2) * integral from gamma^(-2/alpha) to inf of dx / (1 + x^(alpha/2)).

    For alpha = 4 this equals sqrt(gamma)/2 * arctan(sqrt(gamma)).

    Raises:
        DivergenceError: If alpha <= 2
        ParameterError: If gamma <= 0
    """
    if not alpha > 2:
        raise DivergenceError(f"Path-loss exponent must exceed 2, got {alpha}")
    _check_gamma(gamma)
    half_alpha = alpha / 2.0
    value, _ = quad(
        lambda x: 1.0 / (1.0 + x**half_alpha),
        gamma ** (-2.0 / alpha),
        np.inf,
        epsabs=0.0,
        epsrel=ZETA_EPSREL,
        limit=200,
    )
    return 0.5 * gamma ** (2.0 / alpha) * value


def self_interference_factor(gamma: float, alpha: float, convention: str = "laplace") -> float:
    """
    Exponent factor of the interference from the serving BS's own tier beyond the serving BS.

    The truncated-PPP Laplace transform at s = gamma r^alpha / p integrates to
    exp(-pi lambda r² · 2 zeta); the "printed" convention uses zeta alone.
    """
    if convention == "laplace":
        return 2.0 * zeta(gamma, alpha)
    if convention == "printed":
        return zeta(gamma, alpha)
    raise ParameterError(f"Unknown self-interference convention '{convention}'")


def band_intensity(
    tier: Tier, band: Band, scenario: Scenario, delta_c: float, delta_w: float
) -> float:
    """Intensity of ``tier`` transmitters active in ``band`` (incumbents only in unlicensed)."""
    if tier == Tier.INCUMBENT:
        return scenario.lambda_z if band == Band.UNLICENSED else 0.0
    if tier == Tier.CELLULAR:
        unlicensed = delta_c * scenario.lambda_c_bar
        total = scenario.lambda_c
    else:
        unlicensed = delta_w * scenario.lambda_w_bar
        total = scenario.lambda_w
    if band == Band.UNLICENSED:
        return unlicensed
    return max(total - unlicensed, 0.0)


def _tier_power(tier: Tier, scenario: Scenario) -> float:
    return {Tier.CELLULAR: scenario.p_c, Tier.WIFI: scenario.p_w, Tier.INCUMBENT: scenario.p_z}[
        tier
    ]


def laplace_interference(
    s: float,
    source: Tier,
    victim: Tier,
    band: Band,
    scenario: Scenario,
    delta_c: float = 0.0,
    delta_w: float = 0.0,
    serving_distance: Optional[float] = None,
) -> float:
    """
    Laplace transform E[exp(-s I_j)] of the interference from one source tier.

    Cellular victims see their own tier only beyond the serving distance (the serving BS is
    the nearest one), giving the truncated form; every other pair uses the whole-plane form
    exp(-pi lambda_j (s p_j)^(2/alpha) / sinc(2/alpha)). In the licensed band a victim only
    hears its own tier.

    Args:
        s: Laplace variable (1/W), >= 0
        source: Interfering tier
        victim: Tier of the typical user
        band: Band of the typical user's link
        scenario: Scenario parameters
        delta_c, delta_w: Network-wide unlicensed fractions
        serving_distance: Required for the cellular-on-cellular case

    Returns:
        float: Value in (0, 1]
    """
    if not s >= 0:
        raise ParameterError(f"Laplace variable must be >= 0, got {s}")
    if band == Band.LICENSED and source != victim:
        return 1.0
    intensity = band_intensity(source, band, scenario, delta_c, delta_w)
    if s == 0 or intensity == 0:
        return 1.0
    alpha = scenario.alpha
    scale = (s * _tier_power(source, scenario)) ** (2.0 / alpha)
    if source == Tier.CELLULAR and victim == Tier.CELLULAR:
        if serving_distance is None or serving_distance < 0:
            raise ParameterError("The cellular self-interference transform needs r >= 0")
        half_alpha = alpha / 2.0
        tail, _ = quad(
            lambda t: 1.0 / (1.0 + t**half_alpha),
            serving_distance**2 / scale,
            np.inf,
            epsabs=0.0,
            epsrel=ZETA_EPSREL,
            limit=200,
        )
        return math.exp(-math.pi * intensity * scale * tail)
    return math.exp(-math.pi * intensity * scale / sinc(2.0 / alpha))


def radial_integral(noise_coefficient: float, alpha: float, epsrel: float = QUAD_EPSREL):
    """
    Integral over t in (0, inf) of exp(-t - c·t^(alpha/2)).

    Returns:
        tuple: (value, absolute error estimate)
    """
    half_alpha = alpha / 2.0
    value, error = quad(
        lambda t: math.exp(-t - noise_coefficient * t**half_alpha),
        0.0,
        np.inf,
        epsabs=0.0,
        epsrel=epsrel,
        limit=200,
    )
    return value, error


def _nearest_bs_coverage(
    serving_intensity: float,
    exponent: float,
    noise: float,
    gamma: float,
    p_tx: float,
    alpha: float,
) -> float:
    """pi λ ∫ exp(-(noise γ/p) u^(α/2) - exponent·u) du over u = r² in (0, inf)."""
    noise_coefficient = noise * gamma / p_tx * exponent ** (-alpha / 2.0)
    value, _ = radial_integral(noise_coefficient, alpha)
    return min(max(math.pi * serving_intensity / exponent * value, 0.0), 1.0)


def _legacy_range_coverage(
    exponent: float, noise: float, gamma: float, p_tx: float, alpha: float, rho_w: float
) -> float:
    """(2/ρ_w²) ∫ exp(-(noise γ/p) r^α - exponent·r²) r dr on (0, ρ_w), via v = (r/ρ_w)²."""
    noise_term = noise * gamma / p_tx * rho_w**alpha
    range_term = exponent * rho_w**2
    half_alpha = alpha / 2.0
    value, _ = fixed_quad(
        lambda v: np.exp(-noise_term * v**half_alpha - range_term * v),
        0.0,
        1.0,
        n=GAUSS_LEGENDRE_ORDER,
    )
    return min(max(float(value), 0.0), 1.0)


def cross_tier_exponent(gamma: float, victim_power: float, weighted_sum: float, alpha: float):
    """pi γ^(2/α) / (p_victim^(2/α) sinc(2/α)) · Σ λ_j p_j^(2/α)."""
    return (
        math.pi
        * gamma ** (2.0 / alpha)
        / (victim_power ** (2.0 / alpha) * sinc(2.0 / alpha))
        * weighted_sum
    )


@lru_cache(maxsize=65536)
def coverage_cellular_licensed(gamma: float, delta_c: float, scenario: Scenario) -> float:
    """
    Coverage of a cellular user served in the licensed band.

    Interference comes from the other licensed BSs, of intensity lambda_c - delta_c·lambda_c_bar.
    With zero noise the result is 1/(1 + self-interference factor), whatever the intensity.

    Raises:
        DegenerateTierError: If no BS is left in the licensed band
    """
    _check_gamma(gamma)
    _check_fraction("delta_c", delta_c)
    intensity = band_intensity(Tier.CELLULAR, Band.LICENSED, scenario, delta_c, 0.0)
    if not intensity > 0:
        raise DegenerateTierError("No cellular BS operates in the licensed band")
    factor = self_interference_factor(gamma, scenario.alpha, scenario.self_interference)
    exponent = math.pi * intensity * (1.0 + factor)
    return _nearest_bs_coverage(
        intensity, exponent, scenario.noise_c, gamma, scenario.p_c, scenario.alpha
    )


@lru_cache(maxsize=65536)
def coverage_cellular_unlicensed(
    gamma: float, delta_c: float, delta_w: float, scenario: Scenario
) -> float:
    """
    Coverage of a cellular user served in the 6-GHz band.

    Interference: unlicensed BSs beyond the serving one, unlicensed APs and incumbents.

    Raises:
        DegenerateTierError: If delta_c·lambda_c_bar is zero
    """
    _check_gamma(gamma)
    _check_fraction("delta_c", delta_c)
    _check_fraction("delta_w", delta_w)
    alpha = scenario.alpha
    intensity = band_intensity(Tier.CELLULAR, Band.UNLICENSED, scenario, delta_c, delta_w)
    if not intensity > 0:
        raise DegenerateTierError("No cellular BS operates in the unlicensed band")
    weighted = (
        delta_w * scenario.lambda_w_bar * scenario.p_w ** (2.0 / alpha)
        + scenario.lambda_z * scenario.p_z ** (2.0 / alpha)
    )
    factor = self_interference_factor(gamma, alpha, scenario.self_interference)
    exponent = cross_tier_exponent(gamma, scenario.p_c, weighted, alpha) + math.pi * intensity * (
        1.0 + factor
    )
    return _nearest_bs_coverage(intensity, exponent, scenario.noise_c, gamma, scenario.p_c, alpha)


@lru_cache(maxsize=65536)
def coverage_wifi_legacy(gamma: float, delta_w: float, scenario: Scenario) -> float:
    """Coverage of a WiFi user served by an AP in the legacy (licensed-side) WiFi band."""
    _check_gamma(gamma)
    _check_fraction("delta_w", delta_w)
    alpha = scenario.alpha
    intensity = band_intensity(Tier.WIFI, Band.LICENSED, scenario, 0.0, delta_w)
    exponent = math.pi * gamma ** (2.0 / alpha) * intensity / sinc(2.0 / alpha)
    return _legacy_range_coverage(
        exponent, scenario.noise_w, gamma, scenario.p_w, alpha, scenario.rho_w
    )


@lru_cache(maxsize=65536)
def coverage_wifi_unlicensed(
    gamma: float, delta_c: float, delta_w: float, scenario: Scenario
) -> float:
    """Coverage of a WiFi user served by an AP in the 6-GHz band."""
    _check_gamma(gamma)
    _check_fraction("delta_c", delta_c)
    _check_fraction("delta_w", delta_w)
    alpha = scenario.alpha
    weighted = (
        delta_w * scenario.lambda_w_bar * scenario.p_w ** (2.0 / alpha)
        + delta_c * scenario.lambda_c_bar * scenario.p_c ** (2.0 / alpha)
        + scenario.lambda_z * scenario.p_z ** (2.0 / alpha)
    )
    exponent = cross_tier_exponent(gamma, scenario.p_w, weighted, alpha)
    return _legacy_range_coverage(
        exponent, scenario.noise_w, gamma, scenario.p_w, alpha, scenario.rho_w
    )


def coverage(
    tier: Tier, band: Band, gamma: float, delta_c: float, delta_w: float, scenario: Scenario
) -> float:
    """Dispatch to the coverage expression of one tier/band pair."""
    if tier == Tier.CELLULAR:
        if band == Band.LICENSED:
            return coverage_cellular_licensed(gamma, delta_c, scenario)
        return coverage_cellular_unlicensed(gamma, delta_c, delta_w, scenario)
    if band == Band.LICENSED:
        return coverage_wifi_legacy(gamma, delta_w, scenario)
    return coverage_wifi_unlicensed(gamma, delta_c, delta_w, scenario)


def cellular_coverage_closed_form(gamma: float, alpha: float, convention: str = "laplace"):
    """Interference-limited nearest-BS coverage, 1/(1 + self-interference factor)."""
    return 1.0 / (1.0 + self_interference_factor(gamma, alpha, convention))


def wifi_coverage_closed_form(exponent: float, rho_w: float) -> float:
    """Interference-limited WiFi coverage (1 - exp(-c ρ_w²)) / (c ρ_w²)."""
    x = exponent * rho_w**2
    if x == 0:
        return 1.0
    return float(-math.expm1(-x) / x)


def avg_datarate_cellular(
    gamma: float, delta_c: float, delta_w: float, delta_c_i: float, scenario: Scenario
) -> float:
    """
    Average datarate (bit/s) of a user of an entity's cellular network.

    The entity's unlicensed BSs make up delta_c_i·lambda_c_bar/lambda_c of its network; a term
    whose weight is exactly zero is skipped, so an empty band is never evaluated.
    """
    _check_fraction("delta_c_i", delta_c_i)
    if not scenario.lambda_c > 0:
        raise ParameterError("Cellular intensity must be > 0")
    weight = delta_c_i * scenario.lambda_c_bar / scenario.lambda_c
    spectral_efficiency = math.log2(1.0 + gamma)
    rate = 0.0
    if weight > 0:
        unlicensed = coverage_cellular_unlicensed(gamma, delta_c, delta_w, scenario)
        rate += scenario.b_u * spectral_efficiency * unlicensed * weight
    if weight < 1:
        licensed = coverage_cellular_licensed(gamma, delta_c, scenario)
        rate += scenario.b_cl * spectral_efficiency * licensed * (1.0 - weight)
    return rate


def avg_datarate_wifi(
    gamma: float, delta_c: float, delta_w: float, delta_w_i: float, scenario: Scenario
) -> float:
    """Average datarate (bit/s) of a user of an entity's WiFi network."""
    _check_fraction("delta_w_i", delta_w_i)
    if not scenario.lambda_w > 0:
        raise ParameterError("WiFi intensity must be > 0")
    weight = delta_w_i * scenario.lambda_w_bar / scenario.lambda_w
    spectral_efficiency = math.log2(1.0 + gamma)
    rate = 0.0
    if weight > 0:
        unlicensed = coverage_wifi_unlicensed(gamma, delta_c, delta_w, scenario)
        rate += scenario.b_u * spectral_efficiency * unlicensed * weight
    if weight < 1:
        legacy = coverage_wifi_legacy(gamma, delta_w, scenario)
        rate += scenario.b_wl * spectral_efficiency * legacy * (1.0 - weight)
    return rate


@dataclass(frozen=True)
class RatePoint:
    tier: Tier
    delta_c: float
    delta_w: float
    delta_i: float
    value: float


def fraction_grid(step: float) -> List[float]:
    """0, step, 2·step, ..., 1, rounded so grid values compare exactly."""
    steps = int(round(1.0 / step))
    if steps < 1 or abs(steps * step - 1.0) > 1e-9:
        raise ParameterError(f"1/step must be a positive integer, got step={step}")
    return [round(k / steps, 12) for k in range(steps + 1)]


def rate_surface(scenario: Scenario, step: float = 0.1) -> Tuple[List[RatePoint], List[RatePoint]]:
    """
    Cellular and WiFi datarates over the (delta_c, delta_w) grid for a single entity
    owning both networks (delta_k^i = delta_k).

    Returns:
        tuple: (cellular points, wifi points), delta_c-major order
    """
    cellular, wifi = [], []
    for delta_c in fraction_grid(step):
        for delta_w in fraction_grid(step):
            cellular.append(
                RatePoint(
                    Tier.CELLULAR,
                    delta_c,
                    delta_w,
                    delta_c,
                    avg_datarate_cellular(scenario.gamma, delta_c, delta_w, delta_c, scenario),
                )
            )
            wifi.append(
                RatePoint(
                    Tier.WIFI,
                    delta_c,
                    delta_w,
                    delta_w,
                    avg_datarate_wifi(scenario.gamma, delta_c, delta_w, delta_w, scenario),
                )
            )
    logger.debug(f"Rate surface evaluated on {len(cellular)} grid points")
    return cellular, wifi
