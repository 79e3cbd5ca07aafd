"""
Spatial model.

Homogeneous Poisson point processes in a disk window, exclusion-zone carving (Poisson hole
process), the thinned-intensity approximation, band and owner partitioning, and the
WiFi serving-distance and user-cluster samplers.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import ParameterError
from .models import SHARE_TOLERANCE, Window

logger = logging.getLogger(__name__)

# Samplers keep every transmitter at least this far from the origin receiver.
MIN_SEPARATION = 0.1

NO_OWNER = -1


class Tier(IntEnum):
    CELLULAR = 0
    WIFI = 1
    INCUMBENT = 2


class Band(IntEnum):
    NA = 0
    LICENSED = 1
    UNLICENSED = 2


@dataclass(frozen=True, eq=False)
class Deployment:
    """
    Tagged point set, stored column-wise.

    Attributes:
        xy: (n, 2) positions in m
        tier: (n,) Tier codes
        band: (n,) Band codes; incumbents always carry Band.NA
        owner: (n,) entity index or NO_OWNER
        in_zone: (n,) True when the point lies inside an exclusion zone
    """

    xy: np.ndarray
    tier: np.ndarray
    band: np.ndarray
    owner: np.ndarray
    in_zone: np.ndarray

    def __post_init__(self):
        xy = np.array(self.xy, dtype=float).reshape(-1, 2)
        n = len(xy)
        columns = {
            "xy": xy,
            "tier": np.array(self.tier, dtype=np.int8).reshape(n),
            "band": np.array(self.band, dtype=np.int8).reshape(n),
            "owner": np.array(self.owner, dtype=np.int32).reshape(n),
            "in_zone": np.array(self.in_zone, dtype=bool).reshape(n),
        }
        incumbent = columns["tier"] == Tier.INCUMBENT
        if np.any(columns["band"][incumbent] != Band.NA):
            raise ParameterError("Incumbent points cannot carry a band tag")
        if np.any(columns["owner"][incumbent] != NO_OWNER):
            raise ParameterError("Incumbent points cannot have an owner")
        for name, array in columns.items():
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @classmethod
    def from_points(cls, xy, tier: Tier) -> "Deployment":
        """Untagged points of one tier: licensed (or n/a), unowned, outside every zone."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        n = len(xy)
        band = Band.NA if tier == Tier.INCUMBENT else Band.LICENSED
        return cls(
            xy=xy,
            tier=np.full(n, int(tier)),
            band=np.full(n, int(band)),
            owner=np.full(n, NO_OWNER),
            in_zone=np.zeros(n, dtype=bool),
        )

    @classmethod
    def empty(cls) -> "Deployment":
        return cls.from_points(np.empty((0, 2)), Tier.CELLULAR)

    @classmethod
    def concatenate(cls, parts: Sequence["Deployment"]) -> "Deployment":
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls.empty()
        return cls(
            xy=np.concatenate([p.xy for p in parts]),
            tier=np.concatenate([p.tier for p in parts]),
            band=np.concatenate([p.band for p in parts]),
            owner=np.concatenate([p.owner for p in parts]),
            in_zone=np.concatenate([p.in_zone for p in parts]),
        )

    def __len__(self):
        return len(self.xy)

    def subset(self, mask) -> "Deployment":
        return Deployment(
            xy=self.xy[mask],
            tier=self.tier[mask],
            band=self.band[mask],
            owner=self.owner[mask],
            in_zone=self.in_zone[mask],
        )

    def mask(
        self,
        tier: Optional[Tier] = None,
        band: Optional[Band] = None,
        owner: Optional[int] = None,
    ) -> np.ndarray:
        selected = np.ones(len(self), dtype=bool)
        if tier is not None:
            selected &= self.tier == int(tier)
        if band is not None:
            selected &= self.band == int(band)
        if owner is not None:
            selected &= self.owner == int(owner)
        return selected

    def where(self, tier=None, band=None, owner=None) -> "Deployment":
        return self.subset(self.mask(tier=tier, band=band, owner=owner))

    def replace(self, **columns) -> "Deployment":
        return replace(self, **columns)

    def distances(self, origin=(0.0, 0.0)) -> np.ndarray:
        return np.hypot(self.xy[:, 0] - origin[0], self.xy[:, 1] - origin[1])

    def __repr__(self):
        counts = {t.name.lower(): int(np.sum(self.tier == t)) for t in Tier}
        return f"Deployment(n={len(self)}, {counts})"


@dataclass(frozen=True, eq=False)
class ExclusionZones:
    """Disks of radius ``radius`` around incumbent positions."""

    centers: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise ParameterError(f"Exclusion radius must be >= 0, got {self.radius}")
        centers = np.array(self.centers, dtype=float).reshape(-1, 2)
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)

    @classmethod
    def around(cls, incumbents: Deployment, radius: float) -> "ExclusionZones":
        return cls(incumbents.where(tier=Tier.INCUMBENT).xy, radius)

    def __len__(self):
        return len(self.centers)

    def contains(self, xy) -> np.ndarray:
        """True for positions at distance <= radius from some center."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        if not len(self.centers) or not len(xy):
            return np.zeros(len(xy), dtype=bool)
        distance, _ = cKDTree(self.centers).query(xy, k=1)
        return distance <= self.radius


def sample_ppp(
    intensity: float,
    window: Window,
    rng: np.random.Generator,
    tier: Tier = Tier.CELLULAR,
    min_distance: float = MIN_SEPARATION,
) -> Deployment:
    """
    Homogeneous PPP in a disk window.

    A Poisson count of mean ``intensity`` times the window area is placed uniformly on the
    window, then points inside the guard disk of radius ``min_distance`` around the origin are
    dropped.

    Args:
        intensity: Points per m²
        window: Disk window centered on the origin
        rng: Random generator owned by the caller
        tier: Tier tag of the generated points
        min_distance: Guard radius around the origin receiver

    Returns:
        Deployment: Untagged points of ``tier``

    Raises:
        ParameterError: If ``intensity`` is negative
    """
    if not intensity >= 0:
        raise ParameterError(f"Intensity must be >= 0, got {intensity}")
    count = rng.poisson(intensity * window.area)
    radius = window.radius * np.sqrt(rng.random(count))
    angle = rng.random(count) * 2.0 * math.pi
    kept = radius >= min_distance
    radius, angle = radius[kept], angle[kept]
    xy = np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))
    return Deployment.from_points(xy, tier)


def flag_exclusion_zones(points: Deployment, zones: ExclusionZones) -> Deployment:
    """Set ``in_zone`` on every point inside some exclusion zone."""
    return points.replace(in_zone=zones.contains(points.xy))


def carve_php(points: Deployment, zones: ExclusionZones) -> Deployment:
    """Keep only the points farther than the zone radius from every zone center."""
    return points.subset(~zones.contains(points.xy))


def thinned_intensity(lam: float, lam_z: float, rho: float) -> float:
    """Intensity of a PPP after removing exclusion zones: lam * exp(-pi lam_z rho²)."""
    if lam < 0 or lam_z < 0 or rho < 0:
        raise ParameterError("Intensities and radius must be >= 0")
    return lam * math.exp(-math.pi * lam_z * rho**2)


def _check_fraction(delta) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    if np.any(~((delta >= 0.0) & (delta <= 1.0))):
        raise ParameterError(f"Band fractions must lie in [0, 1], got {delta}")
    return delta


def assign_bands(
    points: Deployment,
    delta: Union[float, np.ndarray],
    uniforms: np.ndarray,
) -> Deployment:
    """
    Tag cellular/WiFi points licensed or unlicensed against pre-drawn uniforms.

    A point goes unlicensed when it is outside every zone and its uniform is below its
    fraction. Drawing ``uniforms`` once and re-thresholding gives common random numbers
    across action profiles.

    Args:
        points: Points carrying ``in_zone`` flags
        delta: Scalar fraction, or one fraction per point
        uniforms: One U(0,1) draw per point
    """
    delta = _check_fraction(delta)
    unlicensed = ~points.in_zone & (np.asarray(uniforms) < delta)
    band = np.where(unlicensed, int(Band.UNLICENSED), int(Band.LICENSED))
    band = np.where(points.tier == Tier.INCUMBENT, int(Band.NA), band)
    return points.replace(band=band)


def split_band(
    points: Deployment,
    delta: Union[float, np.ndarray],
    rng: np.random.Generator,
) -> Tuple[Deployment, Deployment]:
    """
    Split cellular/WiFi points between the licensed and unlicensed bands.

    Each out-of-zone point goes unlicensed independently with probability ``delta``;
    in-zone points stay licensed. Incumbents are left out of both outputs.

    Returns:
        tuple: (licensed, unlicensed) deployments whose union is the non-incumbent input
    """
    tagged = assign_bands(points, delta, rng.random(len(points)))
    return tagged.where(band=Band.LICENSED), tagged.where(band=Band.UNLICENSED)


def partition_entities(
    points: Deployment,
    shares: Sequence[float],
    rng: np.random.Generator,
) -> Deployment:
    """
    Assign each non-incumbent point to entity ``i`` with probability ``shares[i]``.

    Raises:
        ParameterError: If shares are negative or do not sum to 1
    """
    shares = np.asarray(shares, dtype=float)
    if shares.ndim != 1 or not len(shares) or np.any(shares < 0):
        raise ParameterError(f"Shares must be a non-empty list of non-negative values: {shares}")
    if abs(math.fsum(shares) - 1.0) > SHARE_TOLERANCE:
        raise ParameterError(f"Shares must sum to 1, got {math.fsum(shares):.12g}")
    owned = points.tier != Tier.INCUMBENT
    owner = np.full(len(points), NO_OWNER, dtype=np.int32)
    owner[owned] = rng.choice(len(shares), size=int(owned.sum()), p=shares / shares.sum())
    return points.replace(owner=owner)


def sample_wifi_serving_distance(rho_w: float, rng: np.random.Generator, size=None):
    """
    Distance from a WiFi user to its AP, density 2r/rho_w² on (0, rho_w).

    The distribution is sometimes called triangular; the density above is what is sampled.
    """
    if not rho_w > 0:
        raise ParameterError(f"rho_w must be > 0, got {rho_w}")
    return rho_w * np.sqrt(rng.random(size))


def sample_matern_users(
    parents: Deployment,
    n_users: int,
    rho_w: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Matérn cluster users: each picks a parent AP uniformly and sits uniformly in its disk.

    Returns:
        tuple: ((n_users, 2) positions, (n_users,) parent indices into ``parents``)
    """
    if n_users < 1:
        raise ParameterError(f"n_users must be >= 1, got {n_users}")
    if not len(parents):
        raise ParameterError("Cannot cluster users around an empty parent set")
    parent = rng.integers(0, len(parents), size=n_users)
    radius = np.maximum(sample_wifi_serving_distance(rho_w, rng, n_users), MIN_SEPARATION)
    angle = rng.random(n_users) * 2.0 * math.pi
    offset = np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))
    return parents.xy[parent] + offset, parent


def sample_uniform_users(
    window: Window,
    n_users: int,
    rng: np.random.Generator,
    center=(0.0, 0.0),
) -> np.ndarray:
    """``n_users`` positions uniform in a disk."""
    if n_users < 1:
        raise ParameterError(f"n_users must be >= 1, got {n_users}")
    radius = window.radius * np.sqrt(rng.random(n_users))
    angle = rng.random(n_users) * 2.0 * math.pi
    return np.column_stack(
        (center[0] + radius * np.cos(angle), center[1] + radius * np.sin(angle))
    )
