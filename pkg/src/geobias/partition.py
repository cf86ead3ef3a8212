"""Partitionings of an ROI into patches about its center.

Each partitioner keys every member by a spatial factor measured from the
ROI center: grid cell in the local planar frame, distance ring, or
bearing sector. Empty patches are never materialized; patches come out
sorted by key and patch members keep ascending ROI order, so the layout
is a pure function of the inputs.

Patch members are positions into ``roi.members``, not map indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidLag, InvalidScale, InvalidSectorCount, UndefinedBearing
from .perfmap import PerformanceMap
from .roi import ROI
from .sphere import TWO_PI, central_angles, initial_bearings, project_locals


@dataclass(frozen=True)
class Patch:
    """One patch: its factor key and member positions within the ROI.

    Grid patches key on (col, row) tuples; ring and sector patches key on
    a single int.
    """

    key: tuple | int
    members: np.ndarray

    def __post_init__(self):
        members = np.array(self.members, dtype=np.int64, copy=True)
        members.flags.writeable = False
        object.__setattr__(self, "members", members)

    @property
    def size(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class Partitioning:
    """All non-empty patches of one ROI under one factor."""

    kind: str
    param: float
    patches: tuple[Patch, ...]

    def __post_init__(self):
        object.__setattr__(self, "patches", tuple(self.patches))


def _group(kind: str, param: float, keys: np.ndarray) -> Partitioning:
    """Patches from per-member key rows, sorted by key."""
    if keys.ndim == 1:
        keys = keys[:, None]
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
    patches = []
    for g in range(len(uniq)):
        members = np.sort(order[bounds[g]:bounds[g + 1]])
        key = tuple(int(v) for v in uniq[g]) if uniq.shape[1] > 1 else int(uniq[g][0])
        patches.append(Patch(key, members))
    return Partitioning(kind, float(param), tuple(patches))


def _member_coords(roi: ROI, pmap: PerformanceMap):
    idx = roi.members
    return pmap.lons[idx], pmap.lats[idx]


def scale_grid(roi: ROI, pmap: PerformanceMap, scale: float) -> Partitioning:
    """Square-grid patches of side ``scale`` (radians) in the local frame.

    The grid is anchored at the ROI center: cell key is
    (floor(x/scale), floor(y/scale)) of the azimuthal-equidistant
    coordinates about the center.
    """
    if not (isinstance(scale, (int, float)) and math.isfinite(scale) and 0.0 < scale < math.pi):
        raise InvalidScale(f"grid scale {scale!r} outside (0, pi)")
    lons, lats = _member_coords(roi, pmap)
    x, y = project_locals(roi.center, lons, lats)
    keys = np.column_stack((np.floor(x / scale), np.floor(y / scale))).astype(np.int64)
    return _group("scale_grid", scale, keys)


def distance_lag(roi: ROI, pmap: PerformanceMap, lag: float) -> Partitioning:
    """Concentric-ring patches of width ``lag`` (radians) about the center."""
    if not (isinstance(lag, (int, float)) and math.isfinite(lag) and 0.0 < lag < math.pi):
        raise InvalidLag(f"ring width {lag!r} outside (0, pi)")
    lons, lats = _member_coords(roi, pmap)
    d = central_angles(roi.center.lon, roi.center.lat, lons, lats)
    keys = np.floor(np.asarray(d) / lag).astype(np.int64)
    return _group("distance_lag", lag, keys)


def direction_sector(roi: ROI, pmap: PerformanceMap, sectors: int) -> Partitioning:
    """Equal-angle bearing sectors about the center, clockwise from north.

    Sector j covers bearings [j*2*pi/k, (j+1)*2*pi/k). A member coincident
    with the center has no bearing and lands in sector 0 by convention.
    """
    if not (isinstance(sectors, (int, np.integer)) and sectors >= 2):
        raise InvalidSectorCount(f"sector count {sectors!r} below 2")
    if abs(roi.center.lat) == 90.0:
        raise UndefinedBearing("bearings about a pole are undefined")
    lons, lats = _member_coords(roi, pmap)
    b = np.asarray(initial_bearings(roi.center.lon, roi.center.lat, lons, lats))
    keys = np.floor(b / (TWO_PI / sectors)).astype(np.int64)
    # Bearings sit in [0, 2*pi), but the division can round the topmost
    # ones up to the sector count; fold those back onto sector 0.
    keys[keys >= sectors] = 0
    return _group("direction_sector", float(sectors), keys)


def partition_roi(roi: ROI, pmap: PerformanceMap, kind: str, param) -> Partitioning:
    """Dispatch to the partitioner named by ``kind``."""
    if kind == "scale_grid":
        return scale_grid(roi, pmap, param)
    if kind == "distance_lag":
        return distance_lag(roi, pmap, param)
    if kind == "direction_sector":
        return direction_sector(roi, pmap, param)
    raise ValueError(f"unknown partition kind {kind!r}")
