"""Acceptance criteria, one test each, each printing a PASS/FAIL line."""
import statistics
from fractions import Fraction

import numpy as np
import pytest

from latpcf.graph import graph_pcf, lattice_from_grid
from latpcf.lattice import Dims, LatticeError, distance_domain, make_grid, validate_dims
from latpcf.lattice import BoundaryKind, TessellationKind
from latpcf.oracle import verify_normalization
from latpcf.patterns import (
    gen_aggregated,
    gen_deterministic_pattern,
    gen_proliferation,
    gen_segregated,
    gen_uniform_random,
    gen_voronoi_lattice,
)
from latpcf.pcf import (
    annular_profile,
    average_profiles,
    first_minimum,
    pcf_profile,
    rectilinear_profile,
)


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n{label}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok
    return emit


def test_ac1_closed_forms_match_enumeration(report):
    rep = verify_normalization(extents=range(4, 13), cube_extents=range(4, 9))
    ok = rep.ok
    report("AC1 closed forms vs enumeration", ok,
           f"{len(rep.rows)} checks, {len(rep.mismatches)} mismatches")
    assert ok, rep.mismatches[:10]


def _random_config(rng, kind):
    while True:
        bc = rng.choice(["periodic", "nonperiodic"])
        n = 3 if kind == "cube" else 2
        extents = tuple(int(v) for v in rng.integers(2, 11, size=n))
        try:
            validate_dims(TessellationKind(kind), Dims(*extents), BoundaryKind(bc))
            distance_domain(kind, "taxicab", bc, extents)
        except LatticeError:
            continue
        occ = rng.random(Dims(*extents).shape) < rng.uniform(0.05, 0.95)
        if occ.sum() >= 2:
            return make_grid(kind, extents, bc, occ)


def test_ac2_general_pcf_equals_native(report):
    rng = np.random.default_rng(2024)
    failures = []
    total = 0
    for kind in ("square", "triangle", "hexagon", "cube"):
        for _ in range(100):
            grid = _random_config(rng, kind)
            native = pcf_profile(grid, "taxicab")
            general = graph_pcf(lattice_from_grid(grid), m_max=native.m[-1])
            total += 1
            if (general.m, general.count, general.expected, general.f) != (
                    native.m, native.count, native.expected, native.f):
                failures.append((kind, grid.bc.value, str(grid.dims)))
    ok = not failures
    report("AC2 general PCF equals native", ok, f"{total} configurations, {len(failures)} differ")
    assert ok, failures[:10]


@pytest.mark.slow
def test_ac3_calibration(report):
    seeds = range(50)
    grids = [gen_uniform_random("square", (100, 100), "periodic", 0.5, s) for s in seeds]
    dev = {}
    for metric in ("taxicab", "uniform"):
        avg = average_profiles([pcf_profile(g, metric) for g in grids])
        dev[metric] = max(abs(v - 1) for v in avg.floats())
    rect = average_profiles([rectilinear_profile(g.with_bc("nonperiodic"))[2] for g in grids])
    dev["rectilinear"] = max(abs(v - 1) for v in rect.floats())
    ann = average_profiles([annular_profile(g, 1) for g in grids])
    dev["annular"] = max(abs(v - 1) for v in ann.floats())
    ok = all(dev[k] <= 0.05 for k in ("taxicab", "uniform", "rectilinear")) and dev["annular"] > 0.1
    detail = ", ".join(f"{k} max|f-1|={v:.4f}" for k, v in dev.items())
    report("AC3 calibration", ok, detail)
    assert ok, dev


def test_ac4_chessboard_exact(report):
    grid = gen_deterministic_pattern("chessboard", (100, 100), "periodic")
    Z = grid.n_sites
    taxi = pcf_profile(grid, "taxicab")
    uni = pcf_profile(grid, "uniform")
    px, py, both = rectilinear_profile(grid.with_bc("nonperiodic"))
    checks = {
        "taxicab odd": all(f == 0 for m, f in taxi.as_dict().items() if m % 2),
        "taxicab even": all(f == Fraction(9999, 4999) for m, f in taxi.as_dict().items() if not m % 2),
        "uniform m=1": uni.at(1) == Fraction(9999, 9998),
        "rectilinear": all(f == Fraction(Z - 1, Z - 2) for f in both.f + px.f + py.f),
    }
    ok = all(checks.values())
    report("AC4 chessboard exact values", ok, ", ".join(f"{k}={v}" for k, v in checks.items()))
    assert ok, checks


def _later_peak(profile, start):
    f = profile.floats()
    i = profile.m.index(start)
    peaks = [f[k] for k in range(i + 1, len(f) - 1) if f[k - 1] < f[k] >= f[k + 1]]
    return max(peaks) if peaks else max(f[i + 1:])


def test_ac5_proliferation(report):
    grids = [gen_proliferation(10, s) for s in range(20)]
    minima, ratios = {}, {}
    for metric in ("uniform", "taxicab"):
        profiles = [pcf_profile(g, metric) for g in grids]
        minima[metric] = statistics.median(first_minimum(p) for p in profiles)
        ratios[metric] = min(
            float(p.at(1)) / _later_peak(p, first_minimum(p)) for p in profiles
        )
    ok = (7 <= minima["uniform"] <= 11 and 9 <= minima["taxicab"] <= 13
          and min(ratios.values()) >= 2)
    detail = (f"median first minimum uniform={minima['uniform']} taxicab={minima['taxicab']}, "
              f"min peak ratio uniform={ratios['uniform']:.2f} taxicab={ratios['taxicab']:.2f}")
    report("AC5 proliferation", ok, detail)
    assert ok, (minima, ratios)


@pytest.mark.slow
def test_ac6_voronoi_segregation(report):
    seg1, seg2, agg1 = [], [], []
    for seed in range(20):
        lattice = gen_voronoi_lattice((30, 30), 1.0, seed)
        seg = graph_pcf(gen_segregated(lattice, 0.4, seed), m_max=2)
        agg = graph_pcf(gen_aggregated(lattice, 0.4, seed), m_max=1)
        seg1.append(float(seg.at(1)))
        seg2.append(float(seg.at(2)))
        agg1.append(float(agg.at(1)))
    f1, f2, a1 = (statistics.fmean(v) for v in (seg1, seg2, agg1))
    checks = {
        "segregated f(1) in [0.58, 0.78]": 0.58 <= f1 <= 0.78,
        "segregated f(2) in [1.0, 1.2]": 1.0 <= f2 <= 1.2,
        "aggregated f(1) > 1.5": a1 > 1.5,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report("AC6 Voronoi segregation/aggregation", ok,
           f"segregated f(1)={f1:.3f} f(2)={f2:.3f}, aggregated f(1)={a1:.3f}"
           + (f"; failed: {'; '.join(failed)}" if failed else ""))
    assert ok, checks


@pytest.mark.slow
def test_ac7_property_suite(report):
    import test_properties as props

    names = ["test_metric_axioms", "test_periodic_ring_size",
             "test_full_occupancy_is_flat", "test_bfs_matches_matrix_power"]
    failed = []
    for name in names:
        test = getattr(props, name)
        assert test.hypothesis.inner_test is not None
        settings = test._hypothesis_internal_use_settings
        assert settings.max_examples >= 1000
        try:
            test()
        except Exception as exc:  # report every property before failing
            failed.append(f"{name}: {type(exc).__name__}")
    ok = not failed
    report("AC7 property suite", ok,
           f"{len(names)} properties x >=1000 cases" + (f"; failed: {failed}" if failed else ""))
    assert ok, failed
