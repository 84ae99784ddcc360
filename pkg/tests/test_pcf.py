import math
from fractions import Fraction

import numpy as np
import pytest

from latpcf.lattice import Dims, make_grid, occupy
from latpcf.patterns import gen_deterministic_pattern, gen_uniform_random
from latpcf.pcf import (
    PcfError,
    PcfProfile,
    annular_profile,
    average_profiles,
    first_minimum,
    pcf_profile,
    rectilinear_profile,
)


def full(kind, dims, bc):
    return make_grid(kind, dims, bc, np.ones(Dims.of(dims).shape, bool))


@pytest.mark.parametrize("kind, metric, bc, dims", [
    ("square", "taxicab", "periodic", (6, 8)),
    ("square", "uniform", "nonperiodic", (7, 5)),
    ("triangle", "taxicab", "periodic", (8, 6)),
    ("triangle", "taxicab", "nonperiodic", (7, 5)),
    ("hexagon", "taxicab", "periodic", (8, 8)),
    ("hexagon", "taxicab", "nonperiodic", (6, 5)),
    ("cube", "uniform", "periodic", (4, 6, 4)),
    ("cube", "taxicab", "nonperiodic", (4, 5, 6)),
])
def test_full_occupancy_gives_exact_unity(kind, metric, bc, dims):
    p = pcf_profile(full(kind, dims, bc), metric)
    assert all(v == 1 for v in p.f)
    assert all(isinstance(v, Fraction) for v in p.f)
    assert p.count == p.expected


def test_chessboard_small_exact():
    g = gen_deterministic_pattern("chessboard", (8, 8), bc="periodic")
    p = pcf_profile(g, "taxicab")
    Z, N = 64, 32
    for m, f in zip(p.m, p.f):
        assert f == (0 if m % 2 else Fraction(Z - 1, N - 1))
    u = pcf_profile(g, "uniform")
    assert u.f[0] == Fraction(2 * N - 1, 2 * (N - 1))


def test_profile_needs_two_agents():
    g = occupy(make_grid("square", (4, 4), "periodic"), [(1, 1)])
    with pytest.raises(PcfError, match="zero expected pairs"):
        pcf_profile(g, "taxicab")
    with pytest.raises(PcfError):
        rectilinear_profile(g.with_bc("nonperiodic"))
    with pytest.raises(PcfError):
        annular_profile(g, 1)


def test_profile_metadata_and_identity(rng):
    g = gen_uniform_random("square", (10, 10), "periodic", "0.3", seed=5)
    p = pcf_profile(g, "uniform")
    assert p.meta["kind"] == "square" and p.meta["metric"] == "uniform"
    assert p.meta["seed"] == 5 and p.meta["N"] == 30
    for c, e, f in zip(p.count, p.expected, p.f):
        assert f * e == c
    assert pcf_profile(g, "uniform", method="pairs") == p


def test_rectilinear_full_and_chessboard():
    px, py, pr = rectilinear_profile(full("square", (5, 4), "nonperiodic"))
    assert set(px.f) == {1} and set(py.f) == {1} and set(pr.f) == {1}
    assert pr.m == (1, 2, 3)
    assert px.m == (1, 2, 3, 4)
    g = gen_deterministic_pattern("chessboard", (6, 4))
    Z = 24
    _, _, pr = rectilinear_profile(g)
    assert set(pr.f) == {Fraction(Z - 1, Z - 2)}
    with pytest.raises(PcfError):
        rectilinear_profile(full("square", (4, 4), "periodic"))


def test_annular_full_grid_bin_one():
    Z = 100
    p = annular_profile(full("square", (10, 10), "periodic"), 1)
    # 2Z nearest-neighbour pairs against an annulus-area estimate of pi (Z - 1)
    assert p.f[0] == pytest.approx(2 * Z / (math.pi * (Z - 1)))
    assert p.meta["normalization"] == "approximate"
    assert p.m == tuple(range(1, 6))


def test_annular_half_bandwidth_has_empty_bins():
    p = annular_profile(full("square", (10, 10), "periodic"), "1/2")
    # no lattice distance falls in (0, 0.5]
    assert p.f[0] == 0
    assert p.m == tuple(range(1, 11))


def test_average_profiles():
    p = PcfProfile((1, 2), (0, 0), (1, 1), (Fraction(0), Fraction(0)), {"kind": "square"})
    q = PcfProfile((1, 2), (4, 4), (2, 2), (Fraction(2), Fraction(2)), {"kind": "square"})
    avg = average_profiles([p, q])
    assert avg.f == (1, 1)
    assert avg.count == (4, 4) and avg.expected == (3, 3)
    assert average_profiles([p, p, p]).f == p.f
    r = PcfProfile((1, 2), (0, 0), (1, 1), (0, 0), {"kind": "hexagon"})
    with pytest.raises(PcfError):
        average_profiles([p, r])
    with pytest.raises(PcfError):
        average_profiles([p, PcfProfile((1,), (0,), (1,), (0,), {"kind": "square"})])
    with pytest.raises(PcfError):
        average_profiles([])


def test_average_records_seeds():
    grids = [gen_uniform_random("square", (8, 8), "periodic", "0.5", seed=s) for s in (1, 2)]
    avg = average_profiles([pcf_profile(g, "taxicab") for g in grids])
    assert avg.meta["seeds"] == "1 2" and avg.meta["replicates"] == 2


def _profile(values):
    n = len(values)
    return PcfProfile(tuple(range(1, n + 1)), (0,) * n, (1,) * n, tuple(values))


def test_first_minimum():
    assert first_minimum(_profile([1, 1, 1])) == 1
    assert first_minimum(_profile([2.9, 1.5, 0.4, 0.4, 1.1])) == 3
    assert first_minimum(_profile([2.9, 1.5, 0.4, 0.4, 1.1]), scope="global") == 3
    wave = [5, 3, 0.2, 1, 2, 1, 0.1, 0.5]
    assert first_minimum(_profile(wave)) == 3
    assert first_minimum(_profile(wave), scope="global") == 7
    assert first_minimum(_profile([3, 2, 1])) == 3
    with pytest.raises(PcfError):
        first_minimum(_profile([]))
    with pytest.raises(PcfError):
        first_minimum(_profile([1]), scope="nearest")


def test_relabelling_agents_leaves_profile_unchanged():
    coords = [(1, 1), (3, 2), (4, 4), (2, 5), (6, 6), (5, 1)]
    a = occupy(make_grid("square", (6, 6), "periodic"), coords)
    b = occupy(make_grid("square", (6, 6), "periodic"), list(reversed(coords)))
    assert pcf_profile(a, "taxicab") == pcf_profile(b, "taxicab")


@pytest.mark.parametrize("pattern, kw", [("circles", {"spacing": 5}), ("stripes", {"width": 4})])
def test_rectilinear_blind_to_balanced_patterns(pattern, kw):
    grid = gen_deterministic_pattern(pattern, (100, 100), "nonperiodic", **kw)
    rect = rectilinear_profile(grid)[2].floats()[:50]
    taxi = pcf_profile(grid, "taxicab").floats()[:40]
    assert max(abs(v - 1) for v in rect) < 0.1
    assert min(taxi) < 0.75 and max(taxi) > 1.4
