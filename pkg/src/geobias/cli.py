"""Command-line interface: compute, sweep and synth subcommands.

Exit status is 0 on success, 1 when the data cannot be scored (parse
failures, no scoreable region, degenerate inputs) and 2 for usage
errors. Error messages go to stderr as ``geobias: error: <code>: ...``
so wrappers can dispatch on the stable code token.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .errors import GeoBiasError, UsageError
from .perfmap import PerformanceMap, dump_csv, dump_geojson, load_map, save_map
from .pipeline import RunConfig, compute_report
from .report import serialize_summary, write_report
from .sphere import GeoLocation, TWO_PI, central_angles, destinations, initial_bearings
from .sre import sweep_hyperparameters

SYNTH_PATTERNS = ("null", "hemisphere", "ring", "sector", "checkerboard")


def synth_map(pattern: str, n: int, seed: int, *,
              center: GeoLocation = GeoLocation(0.0, 20.0),
              cap_radius: float = 0.0, cell: float = 0.01,
              ring_width: float = 0.0125, sectors: int = 8) -> PerformanceMap:
    """Synthetic benchmark map with a known spatial mark pattern.

    Locations are uniform by area, over the whole sphere or, with a
    positive ``cap_radius``, over the cap around ``center``. Marks are
    binary: "null" draws them i.i.d., "hemisphere" marks points west of
    longitude 0, and "ring", "sector" and "checkerboard" alternate by
    distance ring, bearing sector and local grid parity about ``center``.
    Locations depend only on (n, seed, extent), so patterns can share
    point sets.
    """
    if pattern not in SYNTH_PATTERNS:
        raise UsageError(f"unknown pattern {pattern!r}; choose from {SYNTH_PATTERNS}")
    if n < 1:
        raise UsageError(f"n {n!r} below 1")
    if cap_radius and not 0.0 < cap_radius < math.pi / 2.0:
        raise UsageError(f"cap_radius {cap_radius!r} outside (0, pi/2)")
    rng = np.random.default_rng(seed)
    if cap_radius:
        colat = np.arccos(1.0 - rng.random(n) * (1.0 - math.cos(cap_radius)))
        azimuth = rng.random(n) * TWO_PI
        lons, lats = destinations(center, azimuth, colat)
    else:
        lats = np.degrees(np.arcsin(1.0 - 2.0 * rng.random(n)))
        lons = rng.random(n) * 360.0 - 180.0

    if pattern == "null":
        marks = rng.integers(0, 2, n).astype(np.float64)
    elif pattern == "hemisphere":
        marks = (lons < 0.0).astype(np.float64)
    elif pattern == "ring":
        d = central_angles(center.lon, center.lat, lons, lats)
        marks = (np.floor(d / ring_width).astype(np.int64) % 2 == 0).astype(np.float64)
    elif pattern == "sector":
        b = np.asarray(initial_bearings(center.lon, center.lat, lons, lats))
        sec = np.floor(b / (TWO_PI / sectors)).astype(np.int64)
        sec[sec >= sectors] = 0
        marks = (sec % 2 == 0).astype(np.float64)
    else:
        d = central_angles(center.lon, center.lat, lons, lats)
        b = np.asarray(initial_bearings(center.lon, center.lat, lons, lats))
        gx = np.floor(d * np.sin(b) / cell).astype(np.int64)
        gy = np.floor(d * np.cos(b) / cell).astype(np.int64)
        marks = ((gx + gy) % 2 == 0).astype(np.float64)
    return PerformanceMap(lons, lats, marks)


def _default_threads() -> int:
    """Thread count from GEOBIAS_THREADS, 1 when unset."""
    raw = os.environ.get("GEOBIAS_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GEOBIAS_THREADS {raw!r} is not an integer") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v != "")
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v != "")
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _open_input(path: str):
    return sys.stdin if path == "-" else path


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="input path, or - for stdin")
    p.add_argument("--format", choices=("csv", "geojson"), default="csv")
    p.add_argument("--categorical", action="store_true",
                   help="treat perf values as labels")


def _cmd_compute(args) -> int:
    pmap = load_map(_open_input(args.input), args.format, args.categorical)
    if args.flip_marks:
        if not np.all(np.isin(pmap.perfs, (0.0, 1.0))):
            raise UsageError("--flip-marks needs binary 0/1 marks")
        pmap = PerformanceMap(pmap.lons, pmap.lats, 1.0 - pmap.perfs, pmap.layout)
    config = RunConfig(
        scores=tuple(args.scores.split(",")),
        radius=args.radius, scale=args.scale, lag=args.lag, sectors=args.sectors,
        bins=_floats(args.bins), alpha=args.alpha, kl_order=args.kl_order,
        rho=args.rho, k_neighbors=args.k_neighbors, bg_floor=args.bg_floor,
        max_pattern_points=args.max_pattern_points, min_points=args.min_points,
        center_policy=args.center_policy, sample_size=args.sample_size,
        seed=args.seed,
        threads=args.threads if args.threads is not None else _default_threads())
    report = compute_report(pmap, config)
    if args.out:
        write_report(report, args.out)
    sys.stdout.write(serialize_summary(report))
    return 0


def _cmd_sweep(args) -> int:
    import json

    pmap = load_map(_open_input(args.input), args.format, args.categorical)
    cells = sweep_hyperparameters(
        pmap, _floats(args.radii),
        scales=_floats(args.scales), lags=_floats(args.lags),
        sectors=_ints(args.sector_counts),
        alpha=args.alpha, min_points=args.min_points, kl_order=args.kl_order)
    doc = {"cells": [
        {"radius": c.radius, "kind": c.kind, "param": c.param,
         "value": c.value, "error": c.error}
        for c in cells]}
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_synth(args) -> int:
    pmap = synth_map(
        args.pattern, args.n, args.seed,
        center=GeoLocation(args.center_lon, args.center_lat),
        cap_radius=args.cap_radius, cell=args.cell,
        ring_width=args.ring_width, sectors=args.pattern_sectors)
    if args.out:
        save_map(pmap, args.out, args.format)
    else:
        sys.stdout.write(dump_csv(pmap) if args.format == "csv" else dump_geojson(pmap))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geobias",
        description="Information-theoretic geographic-bias scores for "
                    "geolocated performance maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="score a performance map")
    _add_input_args(p)
    p.add_argument("--out", help="directory for locals.csv, locals.geojson, summary.json")
    p.add_argument("--scores", default="u_ssi,m_ssi,sg_sre,dl_sre,ds_sre,spad",
                   help="comma-separated subset of the six scores")
    p.add_argument("--radius", type=float, default=0.05, help="ROI radius in radians")
    p.add_argument("--scale", type=float, default=0.01, help="grid cell side in radians")
    p.add_argument("--lag", type=float, default=0.005, help="ring width in radians")
    p.add_argument("--sectors", type=int, default=8, help="bearing sector count")
    p.add_argument("--bins", default="-0.5,0.5,1.5", help="histogram bin edges")
    p.add_argument("--alpha", type=float, default=1.0, help="histogram smoothing")
    p.add_argument("--kl-order", choices=("roi_patch", "patch_roi"), default="roi_patch")
    p.add_argument("--flip-marks", action="store_true",
                   help="invert binary marks before scoring")
    p.add_argument("--rho", type=float, default=None,
                   help="background intensity per steradian (default: match data)")
    p.add_argument("--k-neighbors", type=int, default=8)
    p.add_argument("--bg-floor", type=int, default=10)
    p.add_argument("--max-pattern-points", type=int, default=5000)
    p.add_argument("--min-points", type=int, default=2)
    p.add_argument("--center-policy", choices=("every_point", "sample"),
                   default="every_point")
    p.add_argument("--sample-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: GEOBIAS_THREADS or 1)")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("sweep", help="global SRE over a hyperparameter grid")
    _add_input_args(p)
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.add_argument("--radii", required=True, help="comma-separated ROI radii")
    p.add_argument("--scales", default="", help="comma-separated grid scales")
    p.add_argument("--lags", default="", help="comma-separated ring widths")
    p.add_argument("--sector-counts", default="", help="comma-separated sector counts")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kl-order", choices=("roi_patch", "patch_roi"), default="roi_patch")
    p.add_argument("--min-points", type=int, default=2)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic benchmark map")
    p.add_argument("--pattern", choices=SYNTH_PATTERNS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "geojson"), default="csv")
    p.add_argument("--center-lon", type=float, default=0.0)
    p.add_argument("--center-lat", type=float, default=20.0)
    p.add_argument("--cap-radius", type=float, default=0.0,
                   help="cap extent in radians; 0 means the whole sphere")
    p.add_argument("--cell", type=float, default=0.01,
                   help="checkerboard cell side in radians")
    p.add_argument("--ring-width", type=float, default=0.0125,
                   help="ring pattern width in radians")
    p.add_argument("--pattern-sectors", type=int, default=8,
                   help="sector pattern count")
    p.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"geobias: error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except GeoBiasError as exc:
        print(f"geobias: error: {exc.code}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
