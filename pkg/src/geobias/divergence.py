"""Histograms over bin layouts and KL divergence between them.

All divergences are in bits (log base 2). Bins are half-open on the right
except the last, which also includes its upper edge, so a layout covers
the closed interval [first edge, last edge] exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceUndefined, LayoutError, OutOfRangeValue
from .perfmap import BinLayout


@dataclass(frozen=True)
class PerformanceHistogram:
    """Counts and probabilities for one layout.

    ``probs`` are the plain normalized counts right after construction and
    may contain zeros; smoothing replaces them with a strictly positive
    vector while keeping the raw counts.
    """

    layout: BinLayout
    counts: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        probs = np.array(self.probs, dtype=np.float64, copy=True)
        if counts.shape != (self.layout.n_bins,) or probs.shape != counts.shape:
            raise LayoutError("counts/probs shape does not match the layout")
        counts.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "probs", probs)


def bin_indices(values, layout: BinLayout) -> np.ndarray:
    """Bin index per value; values must lie within the outer edges."""
    v = np.asarray(values, dtype=np.float64)
    edges = np.asarray(layout.edges)
    if v.size and (np.any(v < edges[0]) or np.any(v > edges[-1])):
        bad = v[(v < edges[0]) | (v > edges[-1])][0]
        raise OutOfRangeValue(f"value {bad!r} outside [{edges[0]!r}, {edges[-1]!r}]")
    idx = np.searchsorted(edges, v, side="right") - 1
    # Values equal to the last edge belong to the last bin.
    return np.minimum(idx, layout.n_bins - 1).astype(np.int64)


def histogram(values, layout: BinLayout) -> PerformanceHistogram:
    """Histogram of ``values`` over ``layout`` with plain normalization."""
    idx = bin_indices(values, layout)
    if idx.size == 0:
        raise OutOfRangeValue("cannot build a histogram from no values")
    counts = np.bincount(idx, minlength=layout.n_bins)
    probs = counts / counts.sum()
    return PerformanceHistogram(layout, counts, probs)


def smooth(hist: PerformanceHistogram, alpha: float = 1.0) -> PerformanceHistogram:
    """Additive (Laplace) smoothing: strictly positive probabilities."""
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and alpha > 0.0):
        raise ValueError(f"alpha {alpha!r} must be a positive finite number")
    counts = hist.counts
    total = counts.sum() + alpha * hist.layout.n_bins
    probs = (counts + alpha) / total
    return PerformanceHistogram(hist.layout, counts, probs)


def kl_divergence(p: PerformanceHistogram, q: PerformanceHistogram) -> float:
    """KL(p || q) in bits.

    Zero-probability bins of p contribute nothing. A bin where p has mass
    but q has none makes the divergence infinite and raises instead.
    """
    if p.layout != q.layout:
        raise LayoutError("histograms use different layouts")
    pp = p.probs
    qq = q.probs
    mask = pp > 0.0
    if np.any(qq[mask] == 0.0):
        raise DivergenceUndefined("q assigns zero mass where p does not")
    terms = pp[mask] * np.log2(pp[mask] / qq[mask])
    return float(np.sum(terms))
