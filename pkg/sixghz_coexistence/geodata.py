"""
Real-world transmitter locations.

Reads a ``lon,lat,kind[,owner]`` CSV, keeps the records inside a bounding box, projects them to
local meters around the box center (equirectangular, enough at city scale) and splits the BSs
and APs among entities by market share.
"""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import GeodataError, ParameterError
from .geometry import (
    NO_OWNER,
    Deployment,
    ExclusionZones,
    Tier,
    flag_exclusion_zones,
    partition_entities,
)
from .streams import RandomStreams

logger = logging.getLogger(__name__)

METERS_PER_DEGREE = 111_320.0

KINDS = {"bs": Tier.CELLULAR, "ap": Tier.WIFI, "incumbent": Tier.INCUMBENT}


@dataclass(frozen=True)
class GeoRecord:
    lon: float
    lat: float
    kind: str
    owner: Optional[int] = None

    @property
    def tier(self) -> Tier:
        return KINDS[self.kind]


@dataclass(frozen=True)
class BoundingBox:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self):
        if not (-90 <= self.lat_min < self.lat_max <= 90):
            raise ParameterError(f"Invalid latitude range [{self.lat_min}, {self.lat_max}]")
        if not (-180 <= self.lon_min < self.lon_max <= 180):
            raise ParameterError(f"Invalid longitude range [{self.lon_min}, {self.lon_max}]")

    @property
    def center(self) -> Tuple[float, float]:
        """(lon, lat) of the box center."""
        return (self.lon_min + self.lon_max) / 2.0, (self.lat_min + self.lat_max) / 2.0

    def contains(self, lon: float, lat: float) -> bool:
        return self.lat_min <= lat <= self.lat_max and self.lon_min <= lon <= self.lon_max


def project(lon, lat, center: Tuple[float, float]) -> np.ndarray:
    """Equirectangular projection to meters east/north of ``center`` = (lon0, lat0)."""
    lon0, lat0 = center
    lon = np.asarray(lon, dtype=float)
    lat = np.asarray(lat, dtype=float)
    x = (lon - lon0) * METERS_PER_DEGREE * math.cos(math.radians(lat0))
    y = (lat - lat0) * METERS_PER_DEGREE
    return np.column_stack((np.atleast_1d(x), np.atleast_1d(y)))


def read_geodata(path) -> List[GeoRecord]:
    """
    Parse a geodata CSV.

    Raises:
        GeodataError: On a missing column, a non-numeric coordinate or an unknown kind
    """
    path = Path(path)
    records = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = {"lon", "lat", "kind"} - set(reader.fieldnames or [])
        if missing:
            raise GeodataError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
        for line, row in enumerate(reader, start=2):
            kind = (row["kind"] or "").strip().lower()
            if kind not in KINDS:
                raise GeodataError(f"{path}:{line}: unknown kind '{row['kind']}'")
            try:
                lon, lat = float(row["lon"]), float(row["lat"])
                owner_text = (row.get("owner") or "").strip()
                owner = int(owner_text) if owner_text else None
            except ValueError as e:
                raise GeodataError(f"{path}:{line}: {e}")
            records.append(GeoRecord(lon=lon, lat=lat, kind=kind, owner=owner))
    logger.debug(f"Read {len(records)} geodata records from {path}")
    return records


def _assign_owners(
    points: Deployment, shares: Sequence[float], rng: np.random.Generator
) -> Deployment:
    if not len(points) or math.fsum(shares) == 0:
        return points
    return partition_entities(points, shares, rng)


def load_geodata(
    path,
    bbox: BoundingBox,
    shares: Sequence[Tuple[float, float]],
    seed: int = 0,
    rho: float = 0.0,
) -> Deployment:
    """
    Deployment of the records inside ``bbox``.

    Args:
        path: CSV with header lon,lat,kind[,owner]
        bbox: Study area; its center becomes the origin
        shares: (v_c, v_w) of every entity
        seed: Seed of the owner draw; records with an owner column keep theirs
        rho: Exclusion-zone radius around the incumbents (m)

    Raises:
        GeodataError: On malformed input, an out-of-range owner or an empty selection
    """
    everything = read_geodata(path)
    records = [r for r in everything if bbox.contains(r.lon, r.lat)]
    if not records:
        raise GeodataError(f"{path}: no record inside the bounding box")
    dropped = len(everything) - len(records)
    if dropped:
        logger.info(f"Dropped {dropped} record(s) outside the bounding box")

    xy = project([r.lon for r in records], [r.lat for r in records], bbox.center)
    tiers = np.array([int(r.tier) for r in records])
    explicit = np.array([NO_OWNER if r.owner is None else r.owner for r in records])
    if np.any((explicit != NO_OWNER) & ((explicit < 0) | (explicit >= len(shares)))):
        raise GeodataError(f"{path}: owner index outside 0..{len(shares) - 1}")

    rng = RandomStreams(seed).stream("owners")
    parts = []
    for tier, column in ((Tier.CELLULAR, 0), (Tier.WIFI, 1), (Tier.INCUMBENT, None)):
        selected = tiers == tier
        points = Deployment.from_points(xy[selected], tier)
        if column is not None:
            points = _assign_owners(points, [s[column] for s in shares], rng)
            fixed = explicit[selected]
            points = points.replace(owner=np.where(fixed != NO_OWNER, fixed, points.owner))
        parts.append(points)

    incumbents = parts[2]
    zones = ExclusionZones.around(incumbents, rho)
    cellular, wifi = (flag_exclusion_zones(p, zones) for p in parts[:2])
    deployment = Deployment.concatenate([cellular, wifi, incumbents])
    logger.info(f"Loaded geodata: {deployment!r}")
    return deployment
