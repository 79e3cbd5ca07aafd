"""
Domain models.

All values are SI-linear: intensities per m², distances in m, powers in W, bandwidths in
Hz, rates in bit/s and the SINR threshold as a linear ratio. Conversion from the
engineering units of scenario files happens in ``scenario_io``.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

from .exceptions import DivergenceError, ParameterError

SELF_INTERFERENCE_CONVENTIONS = ("laplace", "printed")
# "serving-distance" places the serving AP at a range-distributed distance; "in-range" picks
# one sampled AP of the band within rho_w uniformly and redraws when there is none.
WIFI_ASSOCIATION_MODES = ("serving-distance", "in-range")

SHARE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Window:
    """Disk-shaped observation window centered on the origin."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"Window radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def inflated(self, margin: float) -> "Window":
        return Window(self.radius + margin)


@dataclass(frozen=True)
class Scenario:
    """
    Physical-layer parameters of one coexistence scenario.

    Attributes:
        lambda_z, lambda_c, lambda_w: Incumbent, cellular BS and WiFi AP intensities (per m²)
        rho: Exclusion-zone radius around incumbents (m)
        rho_w: WiFi AP range (m)
        p_z, p_c, p_w: Transmit powers (W)
        b_u: Unlicensed 6-GHz bandwidth shared by both tiers (Hz)
        b_cl, b_wl: Licensed cellular and legacy WiFi bandwidths (Hz)
        alpha: Path-loss exponent, must exceed 2
        noise_c, noise_w: Receiver noise powers (W)
        gamma: SINR threshold (linear)
        self_interference: "laplace" (nearest-BS interference exponent 2ζ) or "printed" (ζ)
    """

    lambda_z: float
    lambda_c: float
    lambda_w: float
    rho: float
    rho_w: float
    p_z: float
    p_c: float
    p_w: float
    b_u: float
    b_cl: float
    b_wl: float
    alpha: float = 4.0
    noise_c: float = 0.0
    noise_w: float = 0.0
    gamma: float = 10.0
    self_interference: str = "laplace"

    def __post_init__(self):
        intensities = ("lambda_z", "lambda_c", "lambda_w")
        for name in intensities + ("p_z", "p_c", "p_w", "b_u", "b_cl", "b_wl"):
            value = getattr(self, name)
            if not value >= 0:
                raise ParameterError(f"{name} must be >= 0, got {value}")
        if not self.rho >= 0:
            raise ParameterError(f"rho must be >= 0, got {self.rho}")
        if not self.rho_w > 0:
            raise ParameterError(f"rho_w must be > 0, got {self.rho_w}")
        if not self.alpha > 2:
            raise DivergenceError(f"Path-loss exponent must exceed 2, got {self.alpha}")
        if not (self.noise_c >= 0 and self.noise_w >= 0):
            raise ParameterError("Noise powers must be >= 0")
        if not self.gamma > 0:
            raise ParameterError(f"SINR threshold must be > 0, got {self.gamma}")
        if self.self_interference not in SELF_INTERFERENCE_CONVENTIONS:
            raise ParameterError(
                f"self_interference must be one of {SELF_INTERFERENCE_CONVENTIONS}, "
                f"got '{self.self_interference}'"
            )

    @property
    def lambda_c_bar(self) -> float:
        """Cellular intensity outside exclusion zones."""
        return self.lambda_c * math.exp(-math.pi * self.lambda_z * self.rho**2)

    @property
    def lambda_w_bar(self) -> float:
        """WiFi intensity outside exclusion zones."""
        return self.lambda_w * math.exp(-math.pi * self.lambda_z * self.rho**2)

    def with_gamma(self, gamma: float) -> "Scenario":
        return replace(self, gamma=gamma)

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class ActionVector:
    """Fractions of an entity's eligible cellular and WiFi elements in the unlicensed band."""

    delta_c: float
    delta_w: float

    def __post_init__(self):
        for name in ("delta_c", "delta_w"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")

    def as_tuple(self) -> Tuple[float, float]:
        return (self.delta_c, self.delta_w)

    def distance(self, other: "ActionVector") -> float:
        return math.hypot(self.delta_c - other.delta_c, self.delta_w - other.delta_w)

    def on_grid(self, mu: float) -> bool:
        return all(abs(v / mu - round(v / mu)) < 1e-9 for v in self.as_tuple())

    def __str__(self):
        return f"({self.delta_c:.3g}, {self.delta_w:.3g})"


@dataclass(frozen=True)
class Entity:
    """
    Network operator taking part in the game.

    Attributes:
        v_c, v_w: Shares of the cellular and WiFi networks
        sigma_hat_c, sigma_hat_w: Minimum datarates (bit/s)
        theta_c, theta_w: Preference weights of the two tiers
        action: Current action
        name: Display name
    """

    v_c: float
    v_w: float
    sigma_hat_c: float = 0.0
    sigma_hat_w: float = 0.0
    theta_c: float = 1.0
    theta_w: float = 1.0
    action: ActionVector = field(default_factory=lambda: ActionVector(0.0, 0.0))
    name: str = ""

    def __post_init__(self):
        for name in ("v_c", "v_w"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"Share {name} must lie in [0, 1], got {value}")
        if self.sigma_hat_c < 0 or self.sigma_hat_w < 0:
            raise ParameterError("Datarate thresholds must be >= 0")
        if self.v_c > 0 and not self.theta_c > 0:
            raise ParameterError(f"theta_c must be > 0 when v_c > 0, got {self.theta_c}")
        if self.v_w > 0 and not self.theta_w > 0:
            raise ParameterError(f"theta_w must be > 0 when v_w > 0, got {self.theta_w}")

    def with_action(self, action: ActionVector) -> "Entity":
        return replace(self, action=action)

    @property
    def label(self) -> str:
        return self.name or "entity"


def check_shares(entities: Sequence[Entity]):
    """
    Each tier's shares must sum to 1, or be all zero when no entity runs that tier.

    Raises:
        ParameterError: If a share sum is neither 0 nor 1
    """
    if not entities:
        raise ParameterError("At least one entity is required")
    for tier in ("v_c", "v_w"):
        total = math.fsum(getattr(e, tier) for e in entities)
        if abs(total) > SHARE_TOLERANCE and abs(total - 1.0) > SHARE_TOLERANCE:
            raise ParameterError(f"Shares {tier} must sum to 1, got {total:.12g}")


@dataclass(frozen=True)
class GameConfig:
    """
    Settings of the best-response dynamics.

    ``max_activations`` of None means 500 activations per entity.
    """

    mu: float = 0.1
    epsilon: float = 0.0
    max_activations: Optional[int] = None
    seed: int = 0
    burn_in_fraction: float = 0.2
    stop_on_convergence: bool = True

    def __post_init__(self):
        if not 0 < self.mu <= 1:
            raise ParameterError(f"Grid step mu must lie in (0, 1], got {self.mu}")
        steps = 1.0 / self.mu
        if abs(steps - round(steps)) > 1e-9:
            raise ParameterError(f"1/mu must be an integer, got 1/{self.mu} = {steps}")
        if self.epsilon < 0:
            raise ParameterError(f"Convergence tolerance must be >= 0, got {self.epsilon}")
        if self.max_activations is not None and self.max_activations < 1:
            raise ParameterError(f"max_activations must be >= 1, got {self.max_activations}")
        if not 0 <= self.burn_in_fraction < 1:
            raise ParameterError(
                f"burn_in_fraction must lie in [0, 1), got {self.burn_in_fraction}"
            )

    @property
    def grid_size(self) -> int:
        return int(round(1.0 / self.mu)) + 1

    def activation_budget(self, n_entities: int) -> int:
        budget = self.max_activations if self.max_activations is not None else 500 * n_entities
        if budget < n_entities:
            raise ParameterError(
                f"max_activations ({budget}) must be at least the number of entities ({n_entities})"
            )
        return budget


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings. ``gamma_db_grid`` holds SINR thresholds in dB."""

    n_realizations: int = 2000
    window: Window = field(default_factory=lambda: Window(5000.0))
    seed: int = 0
    gamma_db_grid: Tuple[float, ...] = tuple(float(g) for g in range(-10, 21))
    redraw_factor: int = 100
    wifi_association: str = "serving-distance"

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ParameterError(f"n_realizations must be >= 1, got {self.n_realizations}")
        if not self.gamma_db_grid:
            raise ParameterError("gamma_db_grid must not be empty")
        if self.redraw_factor < 1:
            raise ParameterError(f"redraw_factor must be >= 1, got {self.redraw_factor}")
        if self.wifi_association not in WIFI_ASSOCIATION_MODES:
            raise ParameterError(
                f"wifi_association must be one of {WIFI_ASSOCIATION_MODES}, "
                f"got {self.wifi_association!r}"
            )
        object.__setattr__(self, "gamma_db_grid", tuple(float(g) for g in self.gamma_db_grid))
