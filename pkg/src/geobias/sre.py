"""Spatial-relation entropy scores: patch-weighted KL divergence.

A local score compares the smoothed mark histogram of a whole ROI with
the smoothed histogram of each patch, weighting each patch's divergence
by its share of the ROI. Values are in bits; 0 means every patch looks
like the region, larger means the factor explains mark structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .divergence import histogram, kl_divergence, smooth
from .errors import AggregationError, EmptyPartition, NoScoreableROI
from .partition import Partitioning, partition_roi
from .perfmap import BINARY_LAYOUT, BinLayout, PerformanceMap
from .roi import ROI, ROISet, enumerate_rois

KL_ORDERS = ("roi_patch", "patch_roi")


@dataclass(frozen=True)
class LocalSRE:
    """One ROI's score under one factor."""

    roi_id: int
    kind: str
    param: float
    value: float
    patch_count: int
    patch_sizes: tuple[int, ...]


@dataclass(frozen=True)
class GlobalSRE:
    """Size-weighted aggregate of local scores sharing one factor."""

    kind: str
    param: float
    value: float
    roi_count: int


def local_sre(roi: ROI, pmap: PerformanceMap, partitioning: Partitioning,
              layout: BinLayout = BINARY_LAYOUT, alpha: float = 1.0,
              kl_order: str = "roi_patch") -> LocalSRE:
    """Patch-weighted divergence of one partitioned ROI.

    ``kl_order`` picks the divergence direction: "roi_patch" is
    KL(region || patch), "patch_roi" the reverse. Both smooth each
    histogram with the same alpha before comparing.
    """
    if kl_order not in KL_ORDERS:
        raise ValueError(f"kl_order {kl_order!r} not in {KL_ORDERS}")
    if not partitioning.patches:
        raise EmptyPartition(f"{partitioning.kind} produced no patches")
    marks = pmap.perfs[roi.members]
    total = int(marks.size)
    roi_hist = smooth(histogram(marks, layout), alpha)
    terms = []
    sizes = []
    for patch in partitioning.patches:
        patch_hist = smooth(histogram(marks[patch.members], layout), alpha)
        if kl_order == "roi_patch":
            div = kl_divergence(roi_hist, patch_hist)
        else:
            div = kl_divergence(patch_hist, roi_hist)
        terms.append((patch.size / total) * div)
        sizes.append(patch.size)
    roi_id = -1 if roi.center_index is None else int(roi.center_index)
    return LocalSRE(roi_id, partitioning.kind, partitioning.param,
                    math.fsum(terms), len(sizes), tuple(sizes))


def global_sre(locals_: Sequence[LocalSRE], weights) -> GlobalSRE:
    """Weighted sum of local scores; weights must already sum to 1."""
    w = np.asarray(weights, dtype=np.float64)
    if len(locals_) == 0:
        raise AggregationError("no local scores to aggregate")
    if w.shape != (len(locals_),):
        raise AggregationError(f"{len(locals_)} locals but {w.size} weights")
    if abs(float(w.sum()) - 1.0) > 1e-9:
        raise AggregationError(f"weights sum to {w.sum()!r}, not 1")
    kinds = {(l.kind, l.param) for l in locals_}
    if len(kinds) != 1:
        raise AggregationError(f"mixed factors in one aggregate: {sorted(kinds)}")
    value = math.fsum(float(wi) * l.value for wi, l in zip(w, locals_))
    kind, param = next(iter(kinds))
    return GlobalSRE(kind, param, value, len(locals_))


def score_roiset(roiset: ROISet, pmap: PerformanceMap, kind: str, param, *,
                 layout: BinLayout = BINARY_LAYOUT, alpha: float = 1.0,
                 kl_order: str = "roi_patch") -> tuple[list[LocalSRE], GlobalSRE]:
    """Local scores for every retained ROI plus their aggregate."""
    locals_ = [local_sre(roi, pmap, partition_roi(roi, pmap, kind, param),
                         layout, alpha, kl_order)
               for roi in roiset.rois]
    return locals_, global_sre(locals_, roiset.weights)


@dataclass(frozen=True)
class SweepCell:
    """One (radius, factor, parameter) cell of a hyperparameter sweep."""

    radius: float
    kind: str
    param: float
    value: float | None
    error: str | None = None


def sweep_hyperparameters(pmap: PerformanceMap, radii: Sequence[float], *,
                          scales: Sequence[float] = (),
                          lags: Sequence[float] = (),
                          sectors: Sequence[int] = (),
                          layout: BinLayout | None = None,
                          alpha: float = 1.0,
                          min_points: int = 2,
                          kl_order: str = "roi_patch") -> list[SweepCell]:
    """Global SRE across a grid of radii and factor parameters.

    ROIs are enumerated once per radius and reused across that radius's
    cells. A radius with no scoreable ROI yields error cells rather than
    aborting the sweep. Cell order is radii outer, then grid, ring and
    sector parameters in the order given.
    """
    if layout is None:
        layout = pmap.layout or BINARY_LAYOUT
    combos = ([("scale_grid", s) for s in scales]
              + [("distance_lag", w) for w in lags]
              + [("direction_sector", int(k)) for k in sectors])
    cells: list[SweepCell] = []
    for radius in radii:
        try:
            roiset = enumerate_rois(pmap, radius=radius, min_points=min_points)
        except NoScoreableROI as exc:
            cells.extend(SweepCell(float(radius), kind, float(param), None, exc.code)
                         for kind, param in combos)
            continue
        for kind, param in combos:
            try:
                _, agg = score_roiset(roiset, pmap, kind, param,
                                      layout=layout, alpha=alpha, kl_order=kl_order)
                cells.append(SweepCell(float(radius), kind, float(param), agg.value))
            except Exception as exc:
                code = getattr(exc, "code", type(exc).__name__)
                cells.append(SweepCell(float(radius), kind, float(param), None, code))
    return cells
