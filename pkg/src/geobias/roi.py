"""Regions of interest: spherical-cap membership around candidate centers.

Membership is strict: a point belongs to an ROI iff its central angle to
the center is less than the radius. The index is a latitude-band plus
longitude-window prefilter; the exact haversine test runs on every
candidate it lets through, so index and linear scan agree exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HyperparameterWarning, InvalidRadius, NoScoreableROI, UsageError
from .perfmap import PerformanceMap
from .sphere import GeoLocation, central_angles

SPARSE_ROI_POINTS = 100


@dataclass(frozen=True)
class ROI:
    """One region: center, angular radius, member indices into the map.

    ``members`` is ascending, so member order equals map order. When the
    center is itself a map point, ``center_index`` names it (the point is
    then also a member, its self-distance being zero).
    """

    center: GeoLocation
    radius: float
    members: np.ndarray
    center_index: int | None = None

    def __post_init__(self):
        members = np.array(self.members, dtype=np.int32, copy=True)
        members.flags.writeable = False
        object.__setattr__(self, "members", members)

    @property
    def size(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class ROISet:
    """Scoreable ROIs with their aggregation weights.

    Weights are member counts normalized over the retained ROIs only, so
    they sum to 1. ``skipped`` records (center index, reason) for every
    excluded candidate; reasons are "too_few_points" and "uniform_marks".
    """

    rois: tuple[ROI, ...]
    weights: np.ndarray
    skipped: tuple[tuple[int, str], ...] = field(default=())

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64, copy=True)
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rois", tuple(self.rois))
        object.__setattr__(self, "skipped", tuple(self.skipped))


class SpatialIndex:
    """Latitude-sorted view of a map for cap queries."""

    def __init__(self, pmap: PerformanceMap):
        self.pmap = pmap
        self.order = np.argsort(pmap.lats, kind="stable")
        self.sorted_lats = pmap.lats[self.order]

    def query(self, center: GeoLocation, radius: float) -> np.ndarray:
        """Ascending indices of points with central angle < radius."""
        if not (math.isfinite(radius) and 0.0 < radius < math.pi / 2.0):
            raise InvalidRadius(f"ROI radius {radius!r} outside (0, pi/2)")
        rdeg = math.degrees(radius)
        lo = np.searchsorted(self.sorted_lats, center.lat - rdeg, side="left")
        hi = np.searchsorted(self.sorted_lats, center.lat + rdeg, side="right")
        cand = self.order[lo:hi]
        phi = math.radians(center.lat)
        # A cap away from the poles spans a bounded longitude window; the
        # slack keeps the prefilter a strict superset under rounding.
        if abs(phi) + radius < math.pi / 2.0:
            half_width = math.degrees(math.asin(min(1.0, math.sin(radius) / math.cos(phi))))
            half_width = half_width * (1.0 + 1e-12) + 1e-9
            dlon = np.abs((self.pmap.lons[cand] - center.lon + 180.0) % 360.0 - 180.0)
            cand = cand[dlon <= half_width]
        d = central_angles(center.lon, center.lat, self.pmap.lons[cand], self.pmap.lats[cand])
        return np.sort(cand[d < radius])


def build_index(pmap: PerformanceMap) -> SpatialIndex:
    return SpatialIndex(pmap)


def retrieve_roi(index: SpatialIndex, center: GeoLocation, radius: float,
                 center_index: int | None = None) -> ROI:
    """The ROI at ``center``; an empty member set is a valid result."""
    return ROI(center, radius, index.query(center, radius), center_index)


def roi_is_scoreable(roi: ROI, pmap: PerformanceMap, min_points: int = 2) -> bool:
    """True when the ROI has enough points and its marks are not uniform."""
    if roi.size < max(min_points, 2):
        return False
    marks = pmap.perfs[roi.members]
    return bool(np.any(marks != marks[0]))


def candidate_status(roi: ROI, pmap: PerformanceMap, min_points: int) -> str:
    """"scored", "too_few_points" or "uniform_marks" for one candidate."""
    if roi.size < max(min_points, 2):
        return "too_few_points"
    marks = pmap.perfs[roi.members]
    if not np.any(marks != marks[0]):
        return "uniform_marks"
    return "scored"


def enumerate_candidates(pmap: PerformanceMap, index: SpatialIndex | None = None, *,
                         radius: float, min_points: int = 2,
                         center_policy: str = "every_point",
                         sample_size: int | None = None,
                         seed: int = 0) -> list[tuple[ROI, str]]:
    """Every candidate ROI with its status, in ascending center order.

    ``center_policy`` is "every_point" or "sample"; sampling draws
    ``sample_size`` distinct centers with a seeded generator and keeps
    them in ascending map order.
    """
    if index is None:
        index = build_index(pmap)
    if center_policy == "every_point":
        centers = np.arange(pmap.n, dtype=np.int64)
    elif center_policy == "sample":
        if not sample_size or sample_size < 1:
            raise UsageError("center_policy 'sample' needs a positive sample_size")
        rng = np.random.default_rng(seed)
        k = min(int(sample_size), pmap.n)
        centers = np.sort(rng.choice(pmap.n, size=k, replace=False).astype(np.int64))
    else:
        raise UsageError(f"unknown center_policy {center_policy!r}")
    out = []
    for ci in centers:
        roi = retrieve_roi(index, pmap.location(int(ci)), radius, int(ci))
        out.append((roi, candidate_status(roi, pmap, min_points)))
    return out


def roiset_from_candidates(candidates: list[tuple[ROI, str]],
                           keep: tuple[str, ...] = ("scored",),
                           warn: bool = True) -> ROISet:
    """Retain candidates whose status is in ``keep`` and weight them by size.

    Raises NoScoreableROI when nothing qualifies. The extra "uniform_marks"
    status may be kept for scores that never look at the marks.
    """
    rois = [roi for roi, status in candidates if status in keep]
    skipped = tuple((int(roi.center_index), status)
                    for roi, status in candidates if status not in keep)
    if not rois:
        raise NoScoreableROI(f"all {len(candidates)} candidate ROIs were excluded")
    sizes = np.array([r.size for r in rois], dtype=np.float64)
    weights = sizes / sizes.sum()
    sparse = int(np.sum(sizes < SPARSE_ROI_POINTS))
    if sparse and warn:
        warnings.warn(
            f"{sparse} of {len(rois)} ROIs hold fewer than {SPARSE_ROI_POINTS} points; "
            "consider a larger radius",
            HyperparameterWarning,
            stacklevel=3,
        )
    return ROISet(tuple(rois), weights, skipped)


def enumerate_rois(pmap: PerformanceMap, index: SpatialIndex | None = None, *,
                   radius: float, min_points: int = 2,
                   center_policy: str = "every_point",
                   sample_size: int | None = None, seed: int = 0) -> ROISet:
    """Candidate ROIs centered on map points, filtered for scoreability.

    Raises NoScoreableROI when nothing survives the filter.
    """
    candidates = enumerate_candidates(
        pmap, index, radius=radius, min_points=min_points,
        center_policy=center_policy, sample_size=sample_size, seed=seed)
    return roiset_from_candidates(candidates)
