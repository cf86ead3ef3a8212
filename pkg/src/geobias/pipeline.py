"""End-to-end scoring runs: configuration, orchestration, aggregation.

A run enumerates ROIs once, scores every retained ROI under each
requested score, aggregates with ROI-size weights, and lays the results
out per input point. Per-ROI work is independent, so it can fan out over
a thread pool; results are collected in ROI order and reduced
single-threaded, which keeps outputs byte-identical at any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Mapping

from .errors import UsageError
from .partition import partition_roi
from .perfmap import BINARY_LAYOUT, BinLayout, PerformanceMap
from .report import GLOBAL_KEYS, PointRecord, SCORE_KEYS, ScoreReport, weighted_mean
from .roi import build_index, enumerate_candidates, roiset_from_candidates
from .spad import SpadConfig, spad_score
from .sre import KL_ORDERS, local_sre
from .ssi import local_ssi

_SRE_FACTOR = {"sg_sre": "scale_grid", "dl_sre": "distance_lag", "ds_sre": "direction_sector"}


@dataclass(frozen=True)
class RunConfig:
    """Hyperparameters and switches for one scoring run.

    Angular quantities (radius, scale, lag) are central angles in
    radians. ``bins`` is ignored for categorical maps, which carry their
    own layout.
    """

    scores: tuple[str, ...] = GLOBAL_KEYS
    radius: float = 0.05
    scale: float = 0.01
    lag: float = 0.005
    sectors: int = 8
    bins: tuple[float, ...] = (-0.5, 0.5, 1.5)
    alpha: float = 1.0
    kl_order: str = "roi_patch"
    rho: float | None = None
    k_neighbors: int = 8
    bg_floor: int = 10
    max_pattern_points: int = 5000
    min_points: int = 2
    center_policy: str = "every_point"
    sample_size: int | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(self.scores))
        object.__setattr__(self, "bins", tuple(float(b) for b in self.bins))
        unknown = [s for s in self.scores if s not in GLOBAL_KEYS]
        if unknown:
            raise UsageError(f"unknown scores {unknown!r}; choose from {list(GLOBAL_KEYS)}")
        if not self.scores:
            raise UsageError("no scores requested")
        if not (math.isfinite(self.radius) and 0.0 < self.radius < math.pi / 2.0):
            raise UsageError(f"radius {self.radius!r} outside (0, pi/2)")
        for name in ("scale", "lag"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise UsageError(f"{name} {v!r} must be positive")
        if self.sectors < 2:
            raise UsageError(f"sectors {self.sectors!r} below 2")
        if self.alpha <= 0.0:
            raise UsageError(f"alpha {self.alpha!r} must be positive")
        if self.kl_order not in KL_ORDERS:
            raise UsageError(f"kl_order {self.kl_order!r} not in {KL_ORDERS}")
        if self.rho is not None and self.rho <= 0.0:
            raise UsageError(f"rho {self.rho!r} must be positive")
        if self.k_neighbors < 1:
            raise UsageError(f"k_neighbors {self.k_neighbors!r} below 1")
        if self.min_points < 2:
            raise UsageError(f"min_points {self.min_points!r} below 2")
        if self.threads < 1:
            raise UsageError(f"threads {self.threads!r} below 1")
        if self.center_policy not in ("every_point", "sample"):
            raise UsageError(f"unknown center_policy {self.center_policy!r}")
        if self.center_policy == "sample" and not self.sample_size:
            raise UsageError("center_policy 'sample' needs a sample_size")

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "RunConfig":
        """Build a config from a plain mapping, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise UsageError(f"unknown config key {unknown[0]!r}")
        return cls(**{k: v for k, v in mapping.items()})

    def as_dict(self) -> dict:
        out = asdict(self)
        out["scores"] = list(self.scores)
        out["bins"] = list(self.bins)
        return out


def _layout_for(pmap: PerformanceMap, config: RunConfig) -> BinLayout:
    if pmap.layout is not None:
        return pmap.layout
    if tuple(config.bins) == BINARY_LAYOUT.edges:
        return BINARY_LAYOUT
    return BinLayout(config.bins)


def compute_report(pmap: PerformanceMap, config: RunConfig = RunConfig()) -> ScoreReport:
    """Score a map under one configuration.

    The unmarked SSI never reads the marks, so its ROI retention must
    not either: it keeps every ROI that meets the size rule, which makes
    its local and global values invariant across mark assignments on the
    same locations. Mark-dependent scores additionally drop
    uniform-marks ROIs and are aggregated over that smaller set with
    renormalized size weights.
    """
    layout = _layout_for(pmap, config)
    index = build_index(pmap)
    candidates = enumerate_candidates(
        pmap, index, radius=config.radius, min_points=config.min_points,
        center_policy=config.center_policy, sample_size=config.sample_size,
        seed=config.seed)

    local_keys = [k for k in SCORE_KEYS if k in config.scores]
    marked_keys = [k for k in local_keys if k != "u_ssi"]
    roiset_u = None
    roiset_m = None
    if "u_ssi" in local_keys:
        roiset_u = roiset_from_candidates(candidates, ("scored", "uniform_marks"))
    if marked_keys:
        roiset_m = roiset_from_candidates(candidates, ("scored",), warn=roiset_u is None)

    def score_roi(item):
        roi, status = item
        out = {}
        for key in local_keys:
            if key != "u_ssi" and status != "scored":
                continue
            if key in ("u_ssi", "m_ssi"):
                out[key] = local_ssi(
                    roi, pmap, "unmarked" if key == "u_ssi" else "marked",
                    rho=config.rho, k_neighbors=config.k_neighbors,
                    bg_floor=config.bg_floor,
                    max_points=config.max_pattern_points).value
            else:
                kind = _SRE_FACTOR[key]
                param = {"scale_grid": config.scale,
                         "distance_lag": config.lag,
                         "direction_sector": config.sectors}[kind]
                out[key] = local_sre(
                    roi, pmap, partition_roi(roi, pmap, kind, param),
                    layout, config.alpha, config.kl_order).value
        return out

    work = []
    if local_keys:
        work = [(roi, status) for roi, status in candidates
                if status == "scored"
                or (status == "uniform_marks" and "u_ssi" in local_keys)]
    if config.threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            per_roi = list(pool.map(score_roi, work))
    else:
        per_roi = [score_roi(item) for item in work]

    globals_: dict = {k: None for k in GLOBAL_KEYS}
    scored_values = {roi.center_index: vals for (roi, _), vals in zip(work, per_roi)}
    if roiset_u is not None:
        globals_["u_ssi"] = weighted_mean(
            [scored_values[r.center_index]["u_ssi"] for r in roiset_u.rois],
            roiset_u.weights)
    if roiset_m is not None:
        for key in marked_keys:
            globals_[key] = weighted_mean(
                [scored_values[r.center_index][key] for r in roiset_m.rois],
                roiset_m.weights)
    if "spad" in config.scores:
        globals_["spad"] = spad_score(pmap, SpadConfig(seed=config.seed))

    status_by_center = {roi.center_index: (roi, status) for roi, status in candidates}
    records = []
    for i in range(pmap.n):
        lon = float(pmap.lons[i])
        lat = float(pmap.lats[i])
        if i not in status_by_center:
            records.append(PointRecord(lon, lat, scoreable=False, reason="not_sampled"))
            continue
        roi, status = status_by_center[i]
        scores = scored_values.get(i, {})
        records.append(PointRecord(
            lon, lat,
            scores.get("u_ssi"), scores.get("m_ssi"),
            scores.get("sg_sre"), scores.get("dl_sre"), scores.get("ds_sre"),
            scoreable=status == "scored", reason=status, roi_size=roi.size))

    roi_counts = {
        "candidates": len(candidates),
        "scored": sum(1 for _, s in candidates if s == "scored"),
        "too_few_points": sum(1 for _, s in candidates if s == "too_few_points"),
        "uniform_marks": sum(1 for _, s in candidates if s == "uniform_marks"),
        "not_sampled": pmap.n - len(candidates),
    }
    return ScoreReport(config.as_dict(), tuple(records), globals_, roi_counts)
