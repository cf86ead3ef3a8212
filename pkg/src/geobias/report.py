"""Score reports: per-point records, aggregates, and their fixed formats.

The locals CSV has exactly the columns
``lon,lat,u_ssi,m_ssi,sg_sre,dl_sre,ds_sre,scoreable`` in map order, one
row per input point. The GeoJSON form carries the same records plus the
exclusion reason and ROI size as feature properties. The summary JSON
holds the echoed hyperparameters, the global scores and ROI counts.
Floats serialize as their shortest round-trip form, so re-serializing a
parsed report is byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import EmptyInput
from .perfmap import fmt_float

LOCALS_HEADER = ("lon", "lat", "u_ssi", "m_ssi", "sg_sre", "dl_sre", "ds_sre", "scoreable")
SCORE_KEYS = ("u_ssi", "m_ssi", "sg_sre", "dl_sre", "ds_sre")
GLOBAL_KEYS = SCORE_KEYS + ("spad",)


@dataclass(frozen=True)
class PointRecord:
    """Local scores for one map point; None where nothing was computed."""

    lon: float
    lat: float
    u_ssi: float | None = None
    m_ssi: float | None = None
    sg_sre: float | None = None
    dl_sre: float | None = None
    ds_sre: float | None = None
    scoreable: bool = False
    reason: str = "scored"
    roi_size: int | None = None

    def score(self, key: str) -> float | None:
        return getattr(self, key)


@dataclass(frozen=True)
class ScoreReport:
    """Everything one run produced."""

    hyperparameters: dict
    records: tuple[PointRecord, ...]
    globals: dict
    roi_counts: dict

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))


def weighted_mean(values: Sequence[float], weights: Sequence[float]) -> float:
    """Order-stable weighted mean used by every global aggregate."""
    return math.fsum(float(w) * float(v) for v, w in zip(values, weights))


def recompute_global(report: ScoreReport, key: str) -> float:
    """Re-derive one global from the serialized locals and ROI sizes.

    Each global averages exactly the rows where its local is present;
    the unmarked SSI keeps uniform-marks rows that the other scores drop.
    """
    rows = [r for r in report.records if r.score(key) is not None]
    total = float(sum(r.roi_size for r in rows))
    return math.fsum((r.roi_size / total) * r.score(key) for r in rows)


def normalize_for_map(values: Sequence) -> list:
    """Min-max normalize scores onto [0, 1] for choropleth rendering.

    Entries that are None or non-finite stay None. All-equal finite
    values map to 0. Raises EmptyInput when nothing finite remains.
    """
    vals = [float(v) if v is not None else None for v in values]
    finite = [v for v in vals if v is not None and math.isfinite(v)]
    if not finite:
        raise EmptyInput("no finite values to normalize")
    lo, hi = min(finite), max(finite)
    span = hi - lo
    out = []
    for v in vals:
        if v is None or not math.isfinite(v):
            out.append(None)
        else:
            out.append(0.0 if span == 0.0 else (v - lo) / span)
    return out


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return fmt_float(value)


def serialize_locals_csv(report: ScoreReport) -> str:
    lines = [",".join(LOCALS_HEADER)]
    for r in report.records:
        lines.append(",".join((
            fmt_float(r.lon), fmt_float(r.lat),
            _cell(r.u_ssi), _cell(r.m_ssi),
            _cell(r.sg_sre), _cell(r.dl_sre), _cell(r.ds_sre),
            _cell(r.scoreable),
        )))
    return "\n".join(lines) + "\n"


def parse_locals_csv(text: str) -> list[dict]:
    """Rows of the locals CSV as dicts; empty cells come back as None."""
    lines = [l for l in text.splitlines() if l]
    if not lines or tuple(lines[0].split(",")) != LOCALS_HEADER:
        raise EmptyInput("not a locals CSV")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        row = {}
        for name, cell in zip(LOCALS_HEADER, parts):
            if name == "scoreable":
                row[name] = cell == "true"
            else:
                row[name] = float(cell) if cell else None
        rows.append(row)
    return rows


def serialize_locals_geojson(report: ScoreReport) -> str:
    feats = []
    for r in report.records:
        props = {k: r.score(k) for k in SCORE_KEYS}
        props["scoreable"] = r.scoreable
        props["reason"] = r.reason
        props["roi_size"] = r.roi_size
        feats.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [r.lon, r.lat]},
            "properties": props,
        })
    doc = {"type": "FeatureCollection", "features": feats}
    return json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n"


def serialize_summary(report: ScoreReport) -> str:
    doc = {
        "hyperparameters": report.hyperparameters,
        "globals": {k: report.globals.get(k) for k in GLOBAL_KEYS},
        "roi_counts": report.roi_counts,
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_report(report: ScoreReport, outdir) -> dict:
    """Write locals.csv, locals.geojson and summary.json under ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "locals_csv": outdir / "locals.csv",
        "locals_geojson": outdir / "locals.geojson",
        "summary_json": outdir / "summary.json",
    }
    paths["locals_csv"].write_text(serialize_locals_csv(report), encoding="utf-8")
    paths["locals_geojson"].write_text(serialize_locals_geojson(report), encoding="utf-8")
    paths["summary_json"].write_text(serialize_summary(report), encoding="utf-8")
    return {k: str(v) for k, v in paths.items()}
