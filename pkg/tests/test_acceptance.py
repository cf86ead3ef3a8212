"""Acceptance gate: one test per criterion, one printed line per result.

Null thresholds marked FROZEN are 99th percentiles over 100 seeded
replicates produced by scripts/simulate_null.py on the fixture maps in
fixtures_spatial.py; rerunning that script reproduces them bit for bit.
Run with ``pytest tests/test_acceptance.py -v -s`` to see the per
criterion lines inline; without -s they still appear for any failure.
"""

import functools
import json
import math
import time
import warnings

import numpy as np
import pytest

from fixtures_spatial import (
    RING_WIDTH,
    SECTORS,
    SWEEP_LAGS,
    SWEEP_ROI,
    center_local_sre,
    null_marks_map,
    pattern_config,
    pattern_map,
    spad_map,
    ssi_clustered_map,
    ssi_config,
    ssi_uniform_map,
)
from geobias import (
    BinLayout,
    GeoLocation,
    MarkedPattern,
    PerformanceMap,
    SpadConfig,
    build_index,
    compute_report,
    enumerate_rois,
    histogram,
    kl_divergence,
    morans_i,
    partition_roi,
    retrieve_roi,
    smooth,
    spad_score,
    sweep_hyperparameters,
)
from geobias.cli import main, synth_map
from geobias.divergence import bin_indices
from geobias.errors import HyperparameterWarning, OutOfRangeValue
from geobias.perfmap import BINARY_LAYOUT
from geobias.roi import candidate_status
from geobias.sphere import central_angles, unit_vectors
from geobias.sre import local_sre

# FROZEN: 99th percentiles of the global SRE scores over 100 Bernoulli
# mark replicates on the planted-pattern fixture locations.
NULL_GLOBAL_P99 = {
    "sg_sre": 0.008134014049923817,
    "dl_sre": 0.0019059058499818653,
    "ds_sre": 0.004482515913490213,
}
# FROZEN: same replicates, local scores at the pattern-center ROI.
CENTER_NULL_P99 = {
    "dl_sre": 0.004401514938427293,
    "ds_sre": 0.0074805380805821695,
}
# FROZEN: 99th percentile of the global unmarked SSI over 100 uniform
# location draws of the SSI fixture extent.
U_SSI_NULL_P99 = 12.665411805832639
# FROZEN: globals of the held-out mark replicate (seed 999), never used
# when the percentiles above were fitted.
HELD_OUT_NULL_GLOBALS = {
    "sg_sre": 0.006132982777622303,
    "dl_sre": 0.0014603179094873238,
    "ds_sre": 0.0031186601524884785,
}
HELD_OUT_NULL_SEED = 999


def criterion(number, label, budget_s):
    """Print one pass/fail line and enforce the runtime budget."""
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"criterion {number} ({label}): FAIL", flush=True)
                raise
            elapsed = time.perf_counter() - start
            if elapsed >= budget_s:
                print(f"criterion {number} ({label}): FAIL "
                      f"[{elapsed:.1f}s over the {budget_s:.0f}s budget]",
                      flush=True)
                raise AssertionError(
                    f"criterion {number} ran {elapsed:.1f}s, budget {budget_s}s")
            print(f"criterion {number} ({label}): PASS "
                  f"[{elapsed:.1f}s <= {budget_s:.0f}s]", flush=True)
        return wrapper
    return deco


@criterion(1, "kl oracle", 10.0)
def test_criterion_1_kl_matches_direct_summation():
    rng = np.random.default_rng(42)
    layouts = (BinLayout((-0.5, 0.5, 1.5)),
               BinLayout((0.0, 0.25, 0.5, 0.75, 1.0)),
               BinLayout(tuple(np.linspace(0.0, 1.0, 9))))
    for trial in range(10_000):
        layout = layouts[trial % len(layouts)]
        p = smooth(histogram(rng.random(rng.integers(1, 40)), layout))
        q = smooth(histogram(rng.random(rng.integers(1, 40)), layout))
        direct = sum(pi * (math.log2(pi) - math.log2(qi))
                     for pi, qi in zip(p.probs, q.probs))
        assert abs(kl_divergence(p, q) - direct) <= 1e-12
    for trial in range(1_000):
        layout = layouts[trial % len(layouts)]
        p = smooth(histogram(rng.random(rng.integers(1, 40)), layout))
        assert kl_divergence(p, p) == 0.0


@criterion(2, "four-point fixture", 1.0)
def test_criterion_2_local_sre_fixture():
    pmap = PerformanceMap((-0.3, -0.25, 0.9, 0.95), (0.0,) * 4,
                          (1.0, 1.0, 0.0, 0.0))
    roi = retrieve_roi(build_index(pmap), GeoLocation(-0.3, 0.0), 0.05, 0)
    assert roi.size == 4
    part = partition_roi(roi, pmap, "scale_grid", 0.01)
    gamma = local_sre(roi, pmap, part, BINARY_LAYOUT, 1.0, "roi_patch").value
    # Hand oracle: two pure two-point patches against a 50/50 region,
    # alpha 1 on binary bins, gives 1 - log2(3)/2 per patch and overall.
    assert abs(gamma - (1.0 - math.log2(3.0) / 2.0)) <= 1e-12
    assert round(gamma, 5) == 0.20752


@criterion(3, "factor selectivity", 300.0)
def test_criterion_3_planted_patterns_recovered():
    hemisphere = compute_report(pattern_map("hemisphere"),
                                pattern_config(("ds_sre",)))
    assert hemisphere.globals["ds_sre"] > 10.0 * NULL_GLOBAL_P99["ds_sre"]

    ring = pattern_map("ring")
    ring_dl = center_local_sre(ring, "distance_lag", RING_WIDTH)
    ring_ds = center_local_sre(ring, "direction_sector", SECTORS)
    assert ring_dl > 10.0 * CENTER_NULL_P99["dl_sre"]
    assert ring_dl > ring_ds

    checker = compute_report(pattern_map("checkerboard"),
                             pattern_config(("sg_sre",)))
    assert checker.globals["sg_sre"] > 10.0 * NULL_GLOBAL_P99["sg_sre"]


def dense_moran(lons, lats, marks, k):
    """Direct O(n^2) Moran's I with row-standardized kNN weights."""
    n = marks.size
    vecs = unit_vectors(lons, lats)
    w = np.zeros((n, n))
    for i in range(n):
        dots = vecs @ vecs[i]
        dots[i] = -np.inf
        order = np.argsort(-dots, kind="stable")
        w[i, order[:k]] = 1.0 / k
    z = marks - marks.mean()
    s0 = w.sum()
    i_stat = (n / s0) * (z @ w @ z) / (z @ z)
    e_i = -1.0 / (n - 1)
    s1 = 0.5 * ((w + w.T) ** 2).sum()
    s2 = ((w.sum(axis=0) + w.sum(axis=1)) ** 2).sum()
    b2 = n * (z ** 4).sum() / (z ** 2).sum() ** 2
    var = (n * ((n * n - 3 * n + 3) * s1 - n * s2 + 3 * s0 * s0)
           - b2 * ((n * n - n) * s1 - 2 * n * s2 + 6 * s0 * s0))
    var = var / ((n - 1) * (n - 2) * (n - 3) * s0 * s0) - e_i * e_i
    return i_stat, e_i, var


def random_sphere_points(rng, n):
    lats = np.degrees(np.arcsin(1.0 - 2.0 * rng.random(n)))
    lons = rng.random(n) * 360.0 - 180.0
    return lons, lats


@criterion(4, "morans i", 120.0)
def test_criterion_4_morans_i_against_dense_formula():
    rng = np.random.default_rng(4040)
    for _ in range(100):
        n = int(rng.integers(10, 201))
        lons, lats = random_sphere_points(rng, n)
        marks = rng.normal(size=n)
        k = min(8, n - 1)
        result = morans_i(MarkedPattern(lons, lats, marks, n), k)
        i_ref, e_ref, var_ref = dense_moran(lons, lats, marks, k)
        assert abs(result.i - i_ref) <= 1e-10
        assert abs(result.expected - e_ref) <= 1e-12
        assert abs(result.variance - var_ref) <= 1e-10

    n = 100
    lons, lats = random_sphere_points(rng, n)
    marks = rng.normal(size=n)
    draws = [morans_i(MarkedPattern(lons, lats, rng.permutation(marks), n), 8).i
             for _ in range(200)]
    mean = float(np.mean(draws))
    se = float(np.std(draws, ddof=1)) / math.sqrt(len(draws))
    assert abs(mean - (-1.0 / (n - 1))) <= 3.0 * se


@criterion(5, "unmarked ssi", 120.0)
def test_criterion_5_ssi_separates_clustered_from_uniform():
    clustered = compute_report(ssi_clustered_map(), ssi_config())
    uniform = compute_report(ssi_uniform_map(), ssi_config())
    assert clustered.globals["u_ssi"] > U_SSI_NULL_P99
    assert uniform.globals["u_ssi"] < U_SSI_NULL_P99

    base = ssi_uniform_map()
    report_a = compute_report(null_marks_map(base, 31007), ssi_config())
    report_b = compute_report(null_marks_map(base, 31008), ssi_config())
    assert report_a.globals["u_ssi"] == report_b.globals["u_ssi"]
    vals_a = [r.score("u_ssi") for r in report_a.records]
    vals_b = [r.score("u_ssi") for r in report_b.records]
    assert vals_a == vals_b


@criterion(6, "structural conformance", 10.0)
def test_criterion_6_algorithm_structure():
    # Radius inclusion is strict: a point at exactly the query radius
    # stays outside its own boundary.
    lons = (0.0, 0.5, 1.0, 2.0)
    pmap = PerformanceMap(lons, (0.0,) * 4, (1.0, 0.0, 1.0, 0.0))
    center = GeoLocation(0.0, 0.0)
    dists = central_angles(center.lon, center.lat, np.array(lons), np.zeros(4))
    index = build_index(pmap)
    at_edge = retrieve_roi(index, center, float(dists[2]), None)
    assert 2 not in at_edge.members
    assert set(at_edge.members) == {0, 1}
    just_past = retrieve_roi(index, center,
                             float(np.nextafter(dists[2], np.inf)), None)
    assert set(just_past.members) == {0, 1, 2}

    # Bins are half-open with the last edge closed; outside values raise.
    layout = BinLayout((0.0, 1.0, 2.0))
    np.testing.assert_array_equal(
        bin_indices((0.0, 0.5, 1.0, 1.5, 2.0), layout), (0, 0, 1, 1, 1))
    with pytest.raises(OutOfRangeValue):
        bin_indices((2.5,), layout)
    with pytest.raises(OutOfRangeValue):
        bin_indices((-0.1,), layout)

    # Patch weights sum to one and cover every ROI point exactly once.
    dense = synth_map("checkerboard", 400, 12, cap_radius=0.02)
    roi = retrieve_roi(build_index(dense), GeoLocation(0.0, 20.0), 0.015, None)
    part = partition_roi(roi, dense, "scale_grid", 0.005)
    sizes = [p.size for p in part.patches]
    assert sum(sizes) == roi.size
    assert math.fsum(s / roi.size for s in sizes) == 1.0

    # ROIs whose marks are all identical are excluded from scoring.
    rng = np.random.default_rng(66)
    mixed_lons = rng.normal(0.0, 0.05, 40)
    mixed_lats = rng.normal(0.0, 0.05, 40)
    flat_lons = rng.normal(90.0, 0.05, 40)
    flat_lats = rng.normal(0.0, 0.05, 40)
    pmap2 = PerformanceMap(
        np.concatenate([mixed_lons, flat_lons]),
        np.concatenate([mixed_lats, flat_lats]),
        np.concatenate([rng.integers(0, 2, 40).astype(float), np.ones(40)]))
    index2 = build_index(pmap2)
    flat_roi = retrieve_roi(index2, GeoLocation(90.0, 0.0), 0.01, None)
    assert candidate_status(flat_roi, pmap2, 2) == "uniform_marks"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HyperparameterWarning)
        roiset = enumerate_rois(pmap2, index2, radius=0.01)
    scored_centers = {roi.center_index for roi in roiset.rois}
    assert scored_centers <= set(range(40))


@criterion(7, "lag sweep trend", 180.0)
def test_criterion_7_lag_sweep_strictly_decreasing():
    cells = sweep_hyperparameters(pattern_map("checkerboard"), (SWEEP_ROI,),
                                  lags=SWEEP_LAGS)
    assert [c.param for c in cells] == list(SWEEP_LAGS)
    assert all(c.error is None for c in cells)
    values = [c.value for c in cells]
    assert values[0] > values[1] > values[2]


@criterion(8, "determinism", 60.0)
def test_criterion_8_repeat_runs_byte_identical(tmp_path, capsys):
    from geobias.perfmap import dump_csv

    src = tmp_path / "map.csv"
    src.write_text(dump_csv(synth_map("null", 800, 17, cap_radius=0.05)),
                   encoding="utf-8")

    def run(tag, threads):
        outdir = tmp_path / tag
        code = main(["compute", "--input", str(src), "--out", str(outdir),
                     "--radius", "0.02", "--center-policy", "sample",
                     "--sample-size", "60", "--threads", str(threads)])
        capsys.readouterr()
        assert code == 0
        return {name: (outdir / name).read_bytes()
                for name in ("locals.csv", "locals.geojson", "summary.json")}

    first_t1 = run("a1", 1)
    second_t1 = run("b1", 1)
    assert first_t1 == second_t1
    first_t4 = run("a4", 4)
    second_t4 = run("b4", 4)
    assert first_t4 == second_t4

    # Values also agree across thread counts; the summaries differ only
    # in the echoed threads setting.
    assert first_t1["locals.csv"] == first_t4["locals.csv"]
    assert first_t1["locals.geojson"] == first_t4["locals.geojson"]
    s1 = json.loads(first_t1["summary.json"])
    s4 = json.loads(first_t4["summary.json"])
    assert s1["globals"] == s4["globals"]
    assert s1["roi_counts"] == s4["roi_counts"]


@criterion(9, "random-grid baseline", 60.0)
def test_criterion_9_spad_range_and_ordering():
    rng = np.random.default_rng(909)
    for _ in range(100):
        n = int(rng.integers(20, 201))
        lons, lats = random_sphere_points(rng, n)
        marks = rng.integers(0, 2, n).astype(np.float64)
        if marks.min() == marks.max():
            marks[0] = 1.0 - marks[0]
        score = spad_score(PerformanceMap(lons, lats, marks))
        assert 0.0 <= score <= 100.0

    null_score = spad_score(spad_map("null"))
    hemi_score = spad_score(spad_map("hemisphere"))
    assert null_score < hemi_score
    assert spad_score(spad_map("null")) == null_score
    assert spad_score(spad_map("null"), SpadConfig(seed=99)) != null_score


def test_held_out_null_scores_stay_under_thresholds():
    """A mark replicate never used to fit the percentiles stays below them."""
    base = null_marks_map(pattern_map("null"), HELD_OUT_NULL_SEED)
    report = compute_report(base, pattern_config(("sg_sre", "dl_sre", "ds_sre")))
    for key, p99 in NULL_GLOBAL_P99.items():
        assert report.globals[key] < p99
        assert abs(report.globals[key] - HELD_OUT_NULL_GLOBALS[key]) <= 1e-12
