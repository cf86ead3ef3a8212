"""Spatial self-information: Moran's I surprisal over marked patterns.

An ROI becomes a marked point pattern by joining its data points with a
deterministic lattice of background points, measuring spatial
autocorrelation of the marks, and converting the standardized statistic
into bits of surprisal under the randomization null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePattern, InsufficientPoints
from .perfmap import PerformanceMap
from .roi import ROI
from .sphere import fibonacci_cap_lonlat, unit_vectors

SSI_KINDS = ("unmarked", "marked")
MAX_SSI_BITS = 1024.0
_DOT_BLOCK = 2048


@dataclass(frozen=True)
class MarkedPattern:
    """Marked points: the first ``n_data`` rows are data, the rest are the
    background lattice."""

    lons: np.ndarray
    lats: np.ndarray
    marks: np.ndarray
    n_data: int

    def __post_init__(self):
        for name in ("lons", "lats", "marks"):
            arr = np.array(getattr(self, name), dtype=np.float64, copy=True)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (self.lons.size == self.lats.size == self.marks.size):
            raise ValueError("lons, lats and marks must have equal length")
        if not 0 <= self.n_data <= self.lons.size:
            raise ValueError("n_data outside [0, pattern size]")

    @property
    def n(self) -> int:
        return int(self.lons.size)


@dataclass(frozen=True)
class MoranResult:
    """Moran's I with its randomization-null moments."""

    i: float
    expected: float
    variance: float
    z_score: float
    n: int
    k: int


@dataclass(frozen=True)
class LocalSSI:
    """One ROI's self-information score, in bits."""

    roi_id: int
    kind: str
    value: float


def _subsample(count: int, keep: int) -> np.ndarray:
    """Evenly strided positions; deterministic for a given (count, keep)."""
    if keep >= count:
        return np.arange(count, dtype=np.int64)
    return np.unique(np.round(np.linspace(0, count - 1, keep)).astype(np.int64))


def assemble_pattern(roi: ROI, pmap: PerformanceMap, kind: str = "unmarked", *,
                     rho: float | None = None, bg_floor: int = 10,
                     max_points: int = 5000) -> MarkedPattern:
    """Marked pattern for one ROI.

    Unmarked patterns give every data point mark 1; marked patterns keep
    the raw perf values. Background points always carry mark 0 and sit on
    the Fibonacci cap lattice, so the pattern is a pure function of the
    inputs. ``rho`` is a background intensity per steradian; left unset,
    the background matches the data count. Patterns larger than
    ``max_points`` are thinned by even strides, background first capped
    at half the budget.
    """
    if kind not in SSI_KINDS:
        raise ValueError(f"kind {kind!r} not in {SSI_KINDS}")
    n_data = roi.size
    if rho is None:
        bg = max(n_data, bg_floor)
    else:
        if not (math.isfinite(rho) and rho > 0.0):
            raise ValueError(f"rho {rho!r} must be positive")
        bg = max(math.ceil(rho * math.pi * roi.radius ** 2), bg_floor)
    if n_data + bg > max_points:
        bg = min(bg, max(bg_floor, max_points // 2))
        keep = max(2, max_points - bg)
    else:
        keep = n_data
    sel = _subsample(n_data, keep)
    members = roi.members[sel]
    if kind == "unmarked":
        data_marks = np.ones(members.size)
    else:
        data_marks = pmap.perfs[members]
    bg_lons, bg_lats = fibonacci_cap_lonlat(roi.center, roi.radius, bg)
    return MarkedPattern(
        np.concatenate((pmap.lons[members], bg_lons)),
        np.concatenate((pmap.lats[members], bg_lats)),
        np.concatenate((data_marks, np.zeros(bg))),
        int(members.size),
    )


def _knn_indices(vecs: np.ndarray, k: int) -> np.ndarray:
    """k nearest neighbours by maximum dot product, ties to the lower index.

    Chunked so the full n-by-n matrix never materializes. Rows first take
    a top-(k+32) partition; any row whose selection could be disturbed by
    a dot-product tie at the boundary is redone with a full stable sort,
    so the result always equals the exhaustive one.
    """
    n = vecs.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    m = k + 32
    for start in range(0, n, _DOT_BLOCK):
        stop = min(start + _DOT_BLOCK, n)
        rows = np.arange(stop - start)
        dots = vecs[start:stop] @ vecs.T
        dots[rows, np.arange(start, stop)] = -2.0
        if m >= n:
            out[start:stop] = np.argsort(-dots, axis=1, kind="stable")[:, :k]
            continue
        cand = np.sort(np.argpartition(-dots, m - 1, axis=1)[:, :m], axis=1)
        cdots = np.take_along_axis(dots, cand, axis=1)
        sel = np.argsort(-cdots, axis=1, kind="stable")[:, :k]
        top = np.take_along_axis(cand, sel, axis=1)
        kth = np.take_along_axis(cdots, sel[:, k - 1:k], axis=1)[:, 0]
        dots[rows[:, None], cand] = -np.inf
        bad = np.flatnonzero(dots.max(axis=1) >= kth)
        if bad.size:
            exact = vecs[start + bad] @ vecs.T
            exact[np.arange(bad.size), start + bad] = -2.0
            top[bad] = np.argsort(-exact, axis=1, kind="stable")[:, :k]
        out[start:stop] = top
    return out


def morans_i(pattern: MarkedPattern, k_neighbors: int = 8) -> MoranResult:
    """Moran's I with row-standardized k-nearest-neighbour weights.

    Expectation and variance are the closed-form randomization-null
    moments, which need at least 4 points and non-constant marks.
    """
    if k_neighbors < 1:
        raise ValueError(f"k_neighbors {k_neighbors!r} below 1")
    n = pattern.n
    if n < 4:
        raise InsufficientPoints(f"pattern of {n} points; randomization moments need 4")
    z = pattern.marks - pattern.marks.mean()
    den = float(z @ z)
    if den == 0.0:
        raise DegeneratePattern("marks are all identical")
    k = min(int(k_neighbors), n - 1)
    nbr = _knn_indices(unit_vectors(pattern.lons, pattern.lats), k)

    lag = z[nbr].mean(axis=1)
    # Row-standardized weights sum to 1 per row, so S0 = n and the usual
    # n/S0 prefactor cancels.
    i_stat = float(z @ lag) / den

    fn = float(n)
    s0 = fn
    edges = nbr + (np.arange(n, dtype=np.int64) * n)[:, None]
    edges = np.sort(edges.ravel())
    reverse = (nbr * n + np.arange(n, dtype=np.int64)[:, None]).ravel()
    pos = np.searchsorted(edges, reverse)
    pos = np.minimum(pos, edges.size - 1)
    mutual = int(np.sum(edges[pos] == reverse))
    s1 = fn / k + mutual / (k * k)
    col_w = np.bincount(nbr.ravel(), minlength=n) / k
    s2 = float(np.sum((1.0 + col_w) ** 2))

    b2 = fn * float(np.sum(z ** 4)) / (den * den)
    e_i = -1.0 / (fn - 1.0)
    a = fn * ((fn * fn - 3.0 * fn + 3.0) * s1 - fn * s2 + 3.0 * s0 * s0)
    b = b2 * ((fn * fn - fn) * s1 - 2.0 * fn * s2 + 6.0 * s0 * s0)
    c = (fn - 1.0) * (fn - 2.0) * (fn - 3.0) * s0 * s0
    variance = (a - b) / c - e_i * e_i
    if not variance > 0.0:
        raise DegeneratePattern(f"randomization variance {variance!r} is not positive")
    z_score = (i_stat - e_i) / math.sqrt(variance)
    return MoranResult(i_stat, e_i, variance, z_score, n, k)


def ssi_convert(result: MoranResult) -> float:
    """Two-sided surprisal of the standardized statistic, in bits.

    The two-sided normal tail probability of |z| is erfc(|z|/sqrt(2));
    its negative log base 2 is the self-information, clamped to
    [0, 1024] so an underflowing tail stays finite.
    """
    tail = math.erfc(abs(result.z_score) / math.sqrt(2.0))
    if tail <= 0.0:
        return MAX_SSI_BITS
    return max(0.0, min(-math.log2(tail), MAX_SSI_BITS))


def local_ssi(roi: ROI, pmap: PerformanceMap, kind: str = "unmarked", *,
              rho: float | None = None, k_neighbors: int = 8,
              bg_floor: int = 10, max_points: int = 5000) -> LocalSSI:
    """Self-information of one ROI's marked pattern."""
    pattern = assemble_pattern(roi, pmap, kind, rho=rho,
                               bg_floor=bg_floor, max_points=max_points)
    value = ssi_convert(morans_i(pattern, k_neighbors))
    roi_id = -1 if roi.center_index is None else int(roi.center_index)
    return LocalSSI(roi_id, kind, value)
