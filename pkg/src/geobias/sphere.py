"""Primitives on the unit sphere.

All distances in this package are central angles in radians, so nothing
here depends on an Earth radius. Coordinates are degrees: longitude is
wrapped into [-180, 180) and latitude must lie in [-90, 90].

Array helpers accept plain ndarrays of degrees and are the code paths the
rest of the package uses in bulk; the scalar functions wrap them for
single points and add the domain checks the bulk paths assume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    InvalidLocation,
    InvalidRadius,
    ProjectionDomainError,
    UndefinedBearing,
)

TWO_PI = 2.0 * math.pi
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def normalize_lon(lon):
    """Wrap longitudes (degrees, scalar or array) into [-180, 180)."""
    out = (lon + 180.0) % 360.0 - 180.0
    # The modulo can land exactly on 360 for tiny negative inputs; fold the
    # resulting +180 back to -180 so the half-open interval holds.
    if isinstance(out, np.ndarray):
        return np.where(out >= 180.0, out - 360.0, out)
    return out - 360.0 if out >= 180.0 else out


@dataclass(frozen=True)
class GeoLocation:
    """A point on the sphere; degrees, longitude stored in [-180, 180)."""

    lon: float
    lat: float

    def __post_init__(self):
        lon = float(self.lon)
        lat = float(self.lat)
        if not (math.isfinite(lon) and math.isfinite(lat)):
            raise InvalidLocation(f"non-finite coordinates ({self.lon}, {self.lat})")
        if not -90.0 <= lat <= 90.0:
            raise InvalidLocation(f"latitude {lat} outside [-90, 90]")
        object.__setattr__(self, "lon", float(normalize_lon(lon)))
        object.__setattr__(self, "lat", lat)


class LocalXY(NamedTuple):
    """Planar coordinates (radians) in the local east/north frame."""

    x: float
    y: float


def central_angles(lon1, lat1, lon2, lat2):
    """Haversine central angle in radians between degree coordinates.

    Broadcasts like any numpy ufunc. This is the single distance
    predicate used everywhere (membership tests, ring partitioning,
    nearest-neighbour checks), so every caller agrees bit for bit.
    """
    p1 = np.radians(lat1)
    p2 = np.radians(lat2)
    sp = np.sin((p2 - p1) * 0.5)
    sl = np.sin(np.radians(np.asarray(lon2) - np.asarray(lon1)) * 0.5)
    h = sp * sp + np.cos(p1) * np.cos(p2) * sl * sl
    return 2.0 * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def initial_bearings(lon1, lat1, lon2, lat2):
    """Initial great-circle bearing in [0, 2*pi), clockwise from north.

    Coincident pairs come back as bearing 0 by the atan2(0, 0) convention;
    the scalar wrapper turns that case into an error instead.
    """
    p1 = np.radians(lat1)
    p2 = np.radians(lat2)
    dl = np.radians(np.asarray(lon2) - np.asarray(lon1))
    y = np.sin(dl) * np.cos(p2)
    x = np.cos(p1) * np.sin(p2) - np.sin(p1) * np.cos(p2) * np.cos(dl)
    b = np.arctan2(y, x) % TWO_PI
    # Guard the same wrap edge as normalize_lon: a tiny negative angle can
    # fold onto 2*pi exactly.
    if isinstance(b, np.ndarray):
        return np.where(b >= TWO_PI, 0.0, b)
    return 0.0 if b >= TWO_PI else b


def great_circle_distance(a: GeoLocation, b: GeoLocation) -> float:
    """Central angle in radians between two locations."""
    return float(central_angles(a.lon, a.lat, b.lon, b.lat))


def initial_bearing(a: GeoLocation, b: GeoLocation) -> float:
    """Initial bearing from ``a`` to ``b`` in [0, 2*pi).

    Raises UndefinedBearing for coincident points or when ``a`` is a pole,
    where "north-clockwise" has no meaning.
    """
    if a.lon == b.lon and a.lat == b.lat:
        raise UndefinedBearing(f"coincident points ({a.lon}, {a.lat})")
    if abs(a.lat) == 90.0:
        raise UndefinedBearing(f"bearing from a pole (lat={a.lat}) is undefined")
    return float(initial_bearings(a.lon, a.lat, b.lon, b.lat))


def project_locals(center: GeoLocation, lons, lats):
    """Azimuthal-equidistant coordinates about ``center`` for arrays.

    Returns (x, y) arrays in radians: x east, y north, the center at the
    origin. Every input must lie strictly within a quarter turn of the
    center. Points coincident with the center map to (0, 0) because the
    distance factor is exactly zero there.
    """
    if abs(center.lat) == 90.0:
        raise UndefinedBearing(f"local frame at a pole (lat={center.lat}) is undefined")
    d = central_angles(center.lon, center.lat, lons, lats)
    if np.any(d >= math.pi / 2.0):
        raise ProjectionDomainError("point at or beyond a quarter turn from the center")
    b = initial_bearings(center.lon, center.lat, lons, lats)
    return d * np.sin(b), d * np.cos(b)


def project_azimuthal(center: GeoLocation, p: GeoLocation) -> LocalXY:
    """Azimuthal-equidistant projection of a single point about ``center``."""
    x, y = project_locals(center, np.asarray(p.lon), np.asarray(p.lat))
    return LocalXY(float(x), float(y))


def destinations(center: GeoLocation, bearings, distances):
    """Points at given bearings/central angles from ``center``.

    Built on the 3-D tangent frame at the center, so it stays exact at
    the poles. Returns (lons, lats) degree arrays; distances must lie in
    [0, pi).
    """
    lam = math.radians(center.lon)
    phi = math.radians(center.lat)
    c = np.array([math.cos(phi) * math.cos(lam), math.cos(phi) * math.sin(lam), math.sin(phi)])
    east = np.array([-math.sin(lam), math.cos(lam), 0.0])
    north = np.array([-math.sin(phi) * math.cos(lam), -math.sin(phi) * math.sin(lam), math.cos(phi)])
    b = np.asarray(bearings, dtype=np.float64)
    d = np.asarray(distances, dtype=np.float64)
    if np.any(d < 0.0) or np.any(d >= math.pi):
        raise ProjectionDomainError("destination distance outside [0, pi)")
    tangent = np.outer(np.sin(b), east) + np.outer(np.cos(b), north)
    v = np.outer(np.cos(d), c) + np.sin(d)[:, None] * tangent
    lats = np.degrees(np.arcsin(np.clip(v[:, 2], -1.0, 1.0)))
    lons = normalize_lon(np.degrees(np.arctan2(v[:, 1], v[:, 0])))
    return lons, lats


def inverse_azimuthal(center: GeoLocation, x: float, y: float) -> GeoLocation:
    """Invert :func:`project_azimuthal` for a single planar coordinate."""
    d = math.hypot(x, y)
    if d == 0.0:
        return center
    if d >= math.pi / 2.0:
        raise ProjectionDomainError("planar point at or beyond a quarter turn")
    lons, lats = destinations(center, np.array([math.atan2(x, y)]), np.array([d]))
    return GeoLocation(float(lons[0]), float(lats[0]))


def fibonacci_cap_lonlat(center: GeoLocation, radius: float, count: int):
    """Fibonacci lattice over a spherical cap as (lons, lats) arrays.

    Point i sits at azimuth i times the golden angle and at the colatitude
    that makes cap area grow linearly in i/count, which spreads points
    uniformly by area while keeping all of them strictly inside the cap.
    The layout is a pure function of (center, radius, count).
    """
    if not (isinstance(radius, (int, float)) and math.isfinite(radius) and 0.0 < radius < math.pi / 2.0):
        raise InvalidRadius(f"cap radius {radius!r} outside (0, pi/2)")
    if count < 1:
        raise ValueError(f"count {count} < 1")
    i = np.arange(count, dtype=np.float64)
    frac = i / count
    theta = np.arccos(np.clip(1.0 - (1.0 - math.cos(radius)) * frac, -1.0, 1.0))
    # The outermost ring lands close to the rim for large counts; shave a
    # relative 1e-9 so containment stays strict after the lon/lat round trip.
    theta = np.minimum(theta, radius * (1.0 - 1e-9))
    psi = (i * GOLDEN_ANGLE) % TWO_PI
    return destinations(center, psi, theta)


def fibonacci_cap(center: GeoLocation, radius: float, count: int) -> list[GeoLocation]:
    """Fibonacci lattice over a spherical cap as GeoLocation instances."""
    lons, lats = fibonacci_cap_lonlat(center, radius, count)
    return [GeoLocation(float(lon), float(lat)) for lon, lat in zip(lons, lats)]


def unit_vectors(lons, lats) -> np.ndarray:
    """(n, 3) unit vectors for degree coordinate arrays."""
    lam = np.radians(np.asarray(lons, dtype=np.float64))
    phi = np.radians(np.asarray(lats, dtype=np.float64))
    cp = np.cos(phi)
    return np.column_stack((cp * np.cos(lam), cp * np.sin(lam), np.sin(phi)))
