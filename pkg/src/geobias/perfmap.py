"""Geolocated performance maps and the value layouts scored over them.

A performance map is an ordered set of (lon, lat, perf) triples. Marks are
kept as a float array even for binary outcomes; categorical labels are
encoded to consecutive integer codes first so that one histogram layout
covers them.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientData, InvalidLocation, ParseError
from .sphere import GeoLocation, normalize_lon

CSV_HEADER = ("lon", "lat", "perf")


def fmt_float(x: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(x))


@dataclass(frozen=True)
class BinLayout:
    """Histogram bin edges; bins are half-open with the last edge closed."""

    edges: tuple[float, ...]

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        if len(edges) < 2:
            raise ValueError("a layout needs at least two edges")
        if any(not math.isfinite(e) for e in edges):
            raise ValueError("layout edges must be finite")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("layout edges must be strictly increasing")
        object.__setattr__(self, "edges", edges)

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1


BINARY_LAYOUT = BinLayout((-0.5, 0.5, 1.5))


@dataclass(frozen=True)
class PerformanceMap:
    """Ordered geolocated marks: parallel lon/lat/perf arrays.

    Arrays are float64 and read-only. Order is load order and is part of
    the contract: every downstream index (ROI members, report rows) refers
    to positions in these arrays.
    """

    lons: np.ndarray
    lats: np.ndarray
    perfs: np.ndarray
    layout: BinLayout | None = field(default=None, compare=False)

    def __post_init__(self):
        lons = np.array(self.lons, dtype=np.float64, copy=True)
        lats = np.array(self.lats, dtype=np.float64, copy=True)
        perfs = np.array(self.perfs, dtype=np.float64, copy=True)
        if not (lons.ndim == lats.ndim == perfs.ndim == 1):
            raise ValueError("lons, lats and perfs must be 1-d")
        if not (lons.size == lats.size == perfs.size):
            raise ValueError("lons, lats and perfs must have equal length")
        if lons.size == 0:
            raise InsufficientData("a performance map needs at least one point")
        if not np.all(np.isfinite(lons)) or not np.all(np.isfinite(lats)):
            raise InvalidLocation("non-finite coordinates")
        if np.any(np.abs(lats) > 90.0):
            raise InvalidLocation("latitude outside [-90, 90]")
        if not np.all(np.isfinite(perfs)):
            raise ValueError("non-finite perf values")
        lons = np.asarray(normalize_lon(lons))
        for arr in (lons, lats, perfs):
            arr.flags.writeable = False
        object.__setattr__(self, "lons", lons)
        object.__setattr__(self, "lats", lats)
        object.__setattr__(self, "perfs", perfs)

    @property
    def n(self) -> int:
        return int(self.lons.size)

    def location(self, i: int) -> GeoLocation:
        return GeoLocation(float(self.lons[i]), float(self.lats[i]))

    @classmethod
    def from_points(cls, points: Iterable[tuple[GeoLocation, float]],
                    layout: BinLayout | None = None) -> "PerformanceMap":
        locs, perfs = [], []
        for loc, perf in points:
            locs.append((loc.lon, loc.lat))
            perfs.append(perf)
        if not locs:
            raise InsufficientData("a performance map needs at least one point")
        lons, lats = zip(*locs)
        return cls(np.array(lons), np.array(lats), np.array(perfs, dtype=np.float64), layout)


def binarize_classification(pred, truth) -> int:
    """1 for an exact prediction match, else 0."""
    return 1 if pred == truth else 0


def binarize_regression(errors: Sequence[float]) -> np.ndarray:
    """Binary marks for signed regression errors.

    A point gets mark 0 when its absolute error is below the population
    variance of the signed errors and mark 1 otherwise, so mark 1 flags
    the high-error points under the default polarity.
    """
    e = np.asarray(errors, dtype=np.float64)
    if e.ndim != 1 or e.size < 2:
        raise InsufficientData("regression binarization needs at least two errors")
    if not np.all(np.isfinite(e)):
        raise ValueError("non-finite errors")
    v = float(np.var(e))
    return np.where(np.abs(e) < v, 0.0, 1.0)


def encode_categorical(values: Sequence) -> tuple[np.ndarray, BinLayout]:
    """Map labels to consecutive codes 0..K-1 in sorted label order.

    Sorting the distinct labels makes the coding independent of row order,
    so two files with the same label set always share a layout.
    """
    labels = sorted({str(v) for v in values})
    if not labels:
        raise InsufficientData("no values to encode")
    index = {lab: i for i, lab in enumerate(labels)}
    codes = np.array([index[str(v)] for v in values], dtype=np.float64)
    edges = tuple(i - 0.5 for i in range(len(labels) + 1))
    return codes, BinLayout(edges)


def _read_text(source) -> str:
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {source!r}: {exc.strerror or exc}") from exc


def _parse_csv(text: str, categorical: bool):
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError("empty document")
    header = tuple(h.strip() for h in rows[0])
    if header != CSV_HEADER:
        raise ParseError(f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}")
    lons, lats, perfs = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ParseError(f"row {lineno}: expected 3 fields, got {len(row)}")
        try:
            lon = float(row[0])
            lat = float(row[1])
        except ValueError as exc:
            raise ParseError(f"row {lineno}: {exc}") from None
        if not (math.isfinite(lon) and math.isfinite(lat)):
            raise ParseError(f"row {lineno}: non-finite coordinate")
        if not -90.0 <= lat <= 90.0:
            raise InvalidLocation(f"row {lineno}: latitude {lat} outside [-90, 90]")
        if categorical:
            perfs.append(row[2].strip())
        else:
            try:
                perf = float(row[2])
            except ValueError as exc:
                raise ParseError(f"row {lineno}: {exc}") from None
            if not math.isfinite(perf):
                raise ParseError(f"row {lineno}: non-finite perf")
            perfs.append(perf)
        lons.append(lon)
        lats.append(lat)
    return lons, lats, perfs


def _parse_geojson(text: str, categorical: bool):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ParseError("expected a GeoJSON FeatureCollection")
    feats = doc.get("features")
    if not isinstance(feats, list):
        raise ParseError("FeatureCollection without a features list")
    lons, lats, perfs = [], [], []
    for i, feat in enumerate(feats, start=1):
        try:
            geom = feat["geometry"]
            if geom["type"] != "Point":
                raise ParseError(f"feature {i}: geometry is not a Point")
            lon, lat = float(geom["coordinates"][0]), float(geom["coordinates"][1])
            perf = feat["properties"]["perf"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ParseError(f"feature {i}: {exc!r}") from None
        if not (math.isfinite(lon) and math.isfinite(lat)):
            raise ParseError(f"feature {i}: non-finite coordinate")
        if not -90.0 <= lat <= 90.0:
            raise InvalidLocation(f"feature {i}: latitude {lat} outside [-90, 90]")
        if categorical:
            perfs.append(str(perf))
        else:
            try:
                perf = float(perf)
            except (TypeError, ValueError) as exc:
                raise ParseError(f"feature {i}: {exc!r}") from None
            if not math.isfinite(perf):
                raise ParseError(f"feature {i}: non-finite perf")
            perfs.append(perf)
        lons.append(lon)
        lats.append(lat)
    return lons, lats, perfs


def load_map(source, format: str = "csv", categorical: bool = False) -> PerformanceMap:
    """Load a performance map from a path or open file.

    ``format`` is "csv" (header lon,lat,perf) or "geojson" (Point features
    with a ``perf`` property). With ``categorical`` set, perf values are
    treated as labels, encoded to codes, and the matching layout is stored
    on the returned map.
    """
    if format not in ("csv", "geojson"):
        raise ParseError(f"unknown format {format!r}")
    text = _read_text(source)
    if format == "csv":
        lons, lats, perfs = _parse_csv(text, categorical)
    else:
        lons, lats, perfs = _parse_geojson(text, categorical)
    if not lons:
        raise InsufficientData("document contains no points")
    layout = None
    if categorical:
        codes, layout = encode_categorical(perfs)
        perfs = codes
    return PerformanceMap(np.array(lons), np.array(lats),
                          np.asarray(perfs, dtype=np.float64), layout)


def dump_csv(pmap: PerformanceMap) -> str:
    """CSV text for a map; floats use shortest round-trip form."""
    lines = [",".join(CSV_HEADER)]
    for lon, lat, perf in zip(pmap.lons, pmap.lats, pmap.perfs):
        lines.append(f"{fmt_float(lon)},{fmt_float(lat)},{fmt_float(perf)}")
    return "\n".join(lines) + "\n"


def dump_geojson(pmap: PerformanceMap) -> str:
    """GeoJSON text for a map; one Point feature per row, load order kept."""
    feats = []
    for lon, lat, perf in zip(pmap.lons, pmap.lats, pmap.perfs):
        feats.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [float(lon), float(lat)]},
            "properties": {"perf": float(perf)},
        })
    return json.dumps({"type": "FeatureCollection", "features": feats},
                      separators=(",", ":")) + "\n"


def save_map(pmap: PerformanceMap, dest, format: str = "csv") -> None:
    """Write a map to ``dest`` (path or open text file)."""
    if format == "csv":
        text = dump_csv(pmap)
    elif format == "geojson":
        text = dump_geojson(pmap)
    else:
        raise ParseError(f"unknown format {format!r}")
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")
