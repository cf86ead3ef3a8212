"""Shared synthetic fixtures for the test suite and threshold scripts.

The geometry is pinned here once so the frozen null thresholds stay
tied to the exact maps they were simulated on. scripts/simulate_null.py
imports this module and re-derives every DERIVED constant used by the
acceptance tests.
"""

from __future__ import annotations

import math

import numpy as np

from geobias.cli import synth_map
from geobias.partition import partition_roi
from geobias.perfmap import BINARY_LAYOUT, PerformanceMap
from geobias.pipeline import RunConfig
from geobias.roi import build_index, retrieve_roi
from geobias.sphere import GeoLocation, destinations
from geobias.sre import local_sre

# Pattern-recovery fixture: one dense cap with planted mark patterns.
# The ROI radius keeps every ROI near the paper's 100-point floor.
PATTERN_N = 10_000
PATTERN_SEED = 101
PATTERN_CENTER = GeoLocation(0.0, 20.0)
PATTERN_CAP = 0.05
PATTERN_ROI = 0.02
CELL = 0.01          # checkerboard cell edge and scale-grid edge
RING_WIDTH = 0.005   # ring half-period and distance-lag width
SECTORS = 8

# Seed banks for null replicates.
NULL_MARK_SEED0 = 1000   # Bernoulli marks on the pattern fixture locations
NULL_LOC_SEED0 = 2000    # fresh uniform location draws for the SSI null

# Unmarked-SSI fixture: sparser cap so clustering is unmistakable.
SSI_N = 1000
SSI_SEED = 555
SSI_CLUSTER_SEED = 556
SSI_CAP = 0.1
SSI_ROI = 0.05
SSI_CLUSTERS = 10
SSI_CLUSTER_SPREAD = 0.004

# Lag sweep used by the monotone-trend check.
SWEEP_ROI = 0.03
SWEEP_LAGS = (0.005, 0.01, 0.025)

# Whole-sphere maps for the random-grid baseline; a cap-confined map
# would fall into one grid block for most sampled grids.
SPAD_N = 2000
SPAD_SEED = 7


def pattern_map(pattern: str) -> PerformanceMap:
    """The planted-pattern fixture; all patterns share one point set."""
    return synth_map(pattern, PATTERN_N, PATTERN_SEED, center=PATTERN_CENTER,
                     cap_radius=PATTERN_CAP, cell=CELL, ring_width=RING_WIDTH,
                     sectors=SECTORS)


def null_marks_map(base: PerformanceMap, seed: int) -> PerformanceMap:
    """Bernoulli(0.5) marks re-drawn on the base map's locations."""
    rng = np.random.default_rng(seed)
    marks = rng.integers(0, 2, base.n).astype(np.float64)
    return PerformanceMap(base.lons, base.lats, marks, layout=base.layout)


def pattern_config(scores, threads: int = 1) -> RunConfig:
    return RunConfig(scores=tuple(scores), radius=PATTERN_ROI, scale=CELL,
                     lag=RING_WIDTH, sectors=SECTORS, threads=threads)


def center_roi(pmap: PerformanceMap, radius: float = PATTERN_ROI):
    """The archetype ROI around the planted-pattern center.

    Rings cohere as rings and sectors as wedges only when viewed from
    the pattern center, so distance/direction selectivity is asserted
    there rather than at off-center map points, where both patterns
    degrade into near-parallel stripes.
    """
    return retrieve_roi(build_index(pmap), PATTERN_CENTER, radius, None)


def center_local_sre(pmap: PerformanceMap, kind: str, param) -> float:
    roi = center_roi(pmap)
    part = partition_roi(roi, pmap, kind, param)
    return local_sre(roi, pmap, part, BINARY_LAYOUT, 1.0, "roi_patch").value


def ssi_uniform_map(seed: int = SSI_SEED) -> PerformanceMap:
    return synth_map("null", SSI_N, seed, center=PATTERN_CENTER,
                     cap_radius=SSI_CAP)


def ssi_clustered_map(seed: int = SSI_CLUSTER_SEED) -> PerformanceMap:
    """Tight planted clusters inside the SSI cap, Bernoulli marks."""
    rng = np.random.default_rng(seed)
    u = rng.random(SSI_CLUSTERS)
    colat = np.arccos(1.0 - u * (1.0 - math.cos(0.7 * SSI_CAP)))
    az = rng.random(SSI_CLUSTERS) * 2.0 * math.pi
    clons, clats = destinations(PATTERN_CENTER, az, colat)
    which = rng.integers(0, SSI_CLUSTERS, SSI_N)
    dist = SSI_CLUSTER_SPREAD * np.sqrt(rng.random(SSI_N))
    bear = rng.random(SSI_N) * 2.0 * math.pi
    lons = np.empty(SSI_N)
    lats = np.empty(SSI_N)
    for j in range(SSI_CLUSTERS):
        m = which == j
        lons[m], lats[m] = destinations(
            GeoLocation(float(clons[j]), float(clats[j])), bear[m], dist[m])
    marks = rng.integers(0, 2, SSI_N).astype(np.float64)
    return PerformanceMap(lons, lats, marks)


def ssi_config(threads: int = 1) -> RunConfig:
    return RunConfig(scores=("u_ssi",), radius=SSI_ROI, threads=threads)


def spad_map(pattern: str) -> PerformanceMap:
    return synth_map(pattern, SPAD_N, SPAD_SEED)
