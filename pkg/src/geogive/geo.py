"""Great-circle distance, bounding-box geofence, and availability derivation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable

from .domain import GeoPosition, Offer, UserProfile
from .errors import GeofenceConfigError

EARTH_RADIUS_KM = 6371.0088


def haversine_km(a: GeoPosition, b: GeoPosition) -> float:
    """Great-circle distance in kilometers on a spherical Earth."""
    lat1, lon1 = math.radians(a.lat), math.radians(a.lon)
    lat2, lon2 = math.radians(b.lat), math.radians(b.lon)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))


@dataclass(frozen=True)
class BoundingBox:
    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float

    def __post_init__(self):
        if not (-90.0 <= self.min_lat <= 90.0 and -90.0 <= self.max_lat <= 90.0):
            raise GeofenceConfigError("latitude bounds outside [-90, 90]")
        if not (-180.0 <= self.min_lon <= 180.0 and -180.0 <= self.max_lon <= 180.0):
            raise GeofenceConfigError("longitude bounds outside [-180, 180]")
        if self.min_lat > self.max_lat:
            raise GeofenceConfigError("min_lat > max_lat")
        if self.min_lon > self.max_lon:
            # Also rules out anti-meridian-crossing boxes; city fences never need them.
            raise GeofenceConfigError("min_lon > max_lon (anti-meridian boxes unsupported)")


@dataclass(frozen=True)
class GeofenceConfig:
    bbox: BoundingBox
    region_label: str
    position_max_age: timedelta

    def __post_init__(self):
        if self.position_max_age <= timedelta(0):
            raise GeofenceConfigError("position_max_age must be positive")


def within_bbox(p: GeoPosition, bbox: BoundingBox) -> bool:
    """Closed-box membership: boundary points count as inside."""
    return bbox.min_lat <= p.lat <= bbox.max_lat and bbox.min_lon <= p.lon <= bbox.max_lon


def derive_availability(user: UserProfile, cfg: GeofenceConfig, now: datetime) -> bool:
    """A user is available iff their last position is fresh and inside the fence."""
    pos = user.last_position
    if pos is None:
        return False
    if now - pos.recorded_at > cfg.position_max_age:
        return False
    return within_bbox(pos, cfg.bbox)


def offers_with_distance(
    viewer_pos: GeoPosition, offers: Iterable[Offer]
) -> list[tuple[Offer, float]]:
    """Sort already-visible offers by distance from the viewer, ascending.

    Ties break by created_at descending (newer first), then offer_id. The
    returned distances are unrounded; round at the API boundary.
    """
    annotated = [(offer, haversine_km(viewer_pos, offer.pickup_position)) for offer in offers]
    annotated.sort(key=lambda item: (item[1], -item[0].created_at.timestamp(), item[0].offer_id))
    return annotated


def load_geofence_config(path: str | Path) -> GeofenceConfig:
    """Load a geofence config file; invalid files abort with a diagnostic.

    Expected JSON fields: region_label, min_lat, max_lat, min_lon, max_lon,
    position_max_age_hours.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GeofenceConfigError(f"cannot read geofence config {path}: {exc}") from exc
    missing = [k for k in ("region_label", "min_lat", "max_lat", "min_lon", "max_lon", "position_max_age_hours") if k not in raw]
    if missing:
        raise GeofenceConfigError(f"geofence config missing fields: {', '.join(missing)}")
    bbox = BoundingBox(
        min_lat=float(raw["min_lat"]),
        max_lat=float(raw["max_lat"]),
        min_lon=float(raw["min_lon"]),
        max_lon=float(raw["max_lon"]),
    )
    return GeofenceConfig(
        bbox=bbox,
        region_label=str(raw["region_label"]),
        position_max_age=timedelta(hours=float(raw["position_max_age_hours"])),
    )
