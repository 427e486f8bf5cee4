"""Great-circle distance and green-transport access times.

Distances use the standard haversine formula on a sphere of radius
6371 km. Mobile options (scooters, shared cars) arrive as repeated
snapshots taken over a week; the nearest observation across snapshots
counts. A listing's access figure is the unweighted mean of the
per-mode walking times at 5 km/h.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Optional, Sequence

from .errors import NoOption, NoTransportData

EARTH_RADIUS_KM = 6371.0
WALK_SPEED_KMH = 5.0

TRANSPORT_MODES = ("bike_share", "e_scooter", "metro_station", "bus_stop", "car_share")
# Free-floating modes whose observations are snapshot-timestamped.
MOBILE_MODES = ("e_scooter", "car_share")


@dataclass(frozen=True)
class GeoPoint:
    phi: float  # latitude, degrees
    lam: float  # longitude, degrees

    def __post_init__(self):
        if not -90.0 <= self.phi <= 90.0:
            raise ValueError("latitude out of [-90, 90]")
        if not -180.0 <= self.lam <= 180.0:
            raise ValueError("longitude out of [-180, 180]")


@dataclass(frozen=True)
class TransportPoint:
    location: GeoPoint
    mode: str
    observed_at: Optional[datetime] = None

    def __post_init__(self):
        if self.mode not in TRANSPORT_MODES:
            raise ValueError(f"mode must be one of {TRANSPORT_MODES}")
        if self.mode in MOBILE_MODES and self.observed_at is None:
            raise ValueError(f"mobile mode {self.mode} requires observed_at")

    def to_dict(self) -> dict:
        return {
            "latitude": self.location.phi,
            "longitude": self.location.lam,
            "mode": self.mode,
            "observed_at": self.observed_at.isoformat() if self.observed_at else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TransportPoint":
        return cls(
            location=GeoPoint(float(d["latitude"]), float(d["longitude"])),
            mode=d["mode"],
            observed_at=(
                datetime.fromisoformat(d["observed_at"]) if d.get("observed_at") else None
            ),
        )


@dataclass(frozen=True)
class AccessSummary:
    """Nearest distance and walking time per mode, plus their mean time."""

    distances_km: dict[str, float] = field(default_factory=dict)
    times_hours: dict[str, float] = field(default_factory=dict)
    mean_time_hours: float = 0.0


def haversine_km(a: GeoPoint, s: GeoPoint) -> float:
    """Great-circle distance in km between two points."""
    phi_a, lam_a, phi_s, lam_s = map(math.radians, (a.phi, a.lam, s.phi, s.lam))
    inner = (
        math.sin((phi_s - phi_a) / 2.0) ** 2
        + math.cos(phi_a) * math.cos(phi_s) * math.sin((lam_s - lam_a) / 2.0) ** 2
    )
    # Clamp against rounding slightly above 1 for near-antipodal pairs.
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(inner)))


def walking_time_hours(distance_km: float) -> float:
    """Hours to walk distance_km at the assumed 5 km/h pace."""
    if distance_km < 0:
        raise ValueError("distance must be nonnegative")
    return distance_km / WALK_SPEED_KMH


def _nearest(point: GeoPoint, candidates: Iterable[TransportPoint]) -> Optional[float]:
    best = None
    for candidate in candidates:
        d = haversine_km(point, candidate.location)
        if best is None or d < best:
            best = d
    return best


def nearest_mobile(
    listing_point: GeoPoint,
    snapshots: Sequence[Sequence[TransportPoint]],
    mode: str,
) -> float:
    """Minimum over snapshots of the nearest point of ``mode``."""
    best = None
    for snapshot in snapshots:
        d = _nearest(listing_point, (p for p in snapshot if p.mode == mode))
        if d is not None and (best is None or d < best):
            best = d
    if best is None:
        raise NoOption(mode)
    return best


def access_summary(
    listing_point: GeoPoint,
    fixed_points: Sequence[TransportPoint] = (),
    mobile_snapshots: Sequence[Sequence[TransportPoint]] = (),
) -> AccessSummary:
    """Per-mode nearest distances and times, averaged over available modes.

    A mode that appears both as fixed infrastructure and in snapshots
    contributes its overall nearest observation. Modes absent everywhere
    are simply not averaged; if nothing is available at all the listing
    has no transport data.
    """
    distances: dict[str, float] = {}
    for mode in TRANSPORT_MODES:
        candidates = [_nearest(listing_point, (p for p in fixed_points if p.mode == mode))]
        try:
            candidates.append(nearest_mobile(listing_point, mobile_snapshots, mode))
        except NoOption:
            pass
        present = [d for d in candidates if d is not None]
        if present:
            distances[mode] = min(present)
    if not distances:
        raise NoTransportData("no transport points of any mode")
    times = {mode: walking_time_hours(d) for mode, d in distances.items()}
    return AccessSummary(
        distances_km=distances,
        times_hours=times,
        mean_time_hours=sum(times.values()) / len(times),
    )


def write_transport_jsonl(points: Iterable[TransportPoint], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for point in points:
            fh.write(json.dumps(point.to_dict(), sort_keys=True) + "\n")


def read_transport_jsonl(path) -> list[TransportPoint]:
    points = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                points.append(TransportPoint.from_dict(json.loads(line)))
    return points
