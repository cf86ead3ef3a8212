"""Random-grid performance-dispersion baseline.

The score averages, over a seeded sample of random lon/lat grids, the
mean absolute deviation of non-empty block means from the overall mean,
normalized by the largest possible deviation so the result lives on
[0, 100]. It ignores spatial structure beyond the block means, which is
exactly why it serves as the baseline the entropy scores are compared
against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput
from .perfmap import PerformanceMap


@dataclass(frozen=True)
class SpadConfig:
    """Grid-sampling bounds and seed."""

    max_rows: int = 100
    max_cols: int = 100
    sample_size: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.max_rows < 1 or self.max_cols < 1 or self.sample_size < 1:
            raise ValueError("max_rows, max_cols and sample_size must be positive")


def spad_score(pmap: PerformanceMap, config: SpadConfig = SpadConfig()) -> float:
    """Dispersion of block means over random grids, scaled to [0, 100]."""
    perfs = pmap.perfs
    mean = float(perfs.mean())
    norm = max(float(perfs.max()) - mean, mean - float(perfs.min()))
    if norm == 0.0:
        raise DegenerateInput("all perf values are identical")
    lat01 = (pmap.lats + 90.0) / 180.0
    lon01 = (pmap.lons + 180.0) / 360.0
    rng = np.random.default_rng(config.seed)
    devs = np.empty(config.sample_size)
    for s in range(config.sample_size):
        rows = int(rng.integers(1, config.max_rows + 1))
        cols = int(rng.integers(1, config.max_cols + 1))
        ri = np.minimum((lat01 * rows).astype(np.int64), rows - 1)
        ci = np.minimum((lon01 * cols).astype(np.int64), cols - 1)
        block = ri * cols + ci
        sums = np.bincount(block, weights=perfs, minlength=rows * cols)
        counts = np.bincount(block, minlength=rows * cols)
        occupied = counts > 0
        block_means = sums[occupied] / counts[occupied]
        devs[s] = np.abs(block_means - mean).mean()
    return 100.0 * float(devs.mean()) / norm
