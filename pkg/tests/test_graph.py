import numpy as np
import pytest

from latpcf.graph import (
    UNREACHABLE,
    GeneralLattice,
    GraphError,
    build_distance_matrix,
    graph_pcf,
    grid_to_graph,
    lattice_from_grid,
    pair_counts_from_matrix,
    stream_pair_counts,
)
from latpcf.lattice import Dims, make_grid
from latpcf.metrics import site_index
from latpcf.oracle import matrix_power_distances
from latpcf.pcf import PcfError, pcf_profile


def path3(occupied=()):
    return GeneralLattice.from_edges(3, [(0, 1), (1, 2)], occupied)


def test_path_distance_matrix():
    assert build_distance_matrix(path3()).tolist() == [[0, 1, 2], [1, 0, 1], [2, 1, 0]]


def test_four_cycle():
    D = build_distance_matrix(GeneralLattice.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    assert D[0, 2] == 2 and D[1, 3] == 2
    off = D[~np.eye(4, dtype=bool)]
    assert set(off.tolist()) == {1, 2}


def test_grid_graph_distance_is_taxicab():
    g = grid_to_graph("square", (3, 3), "nonperiodic")
    D = build_distance_matrix(g)
    a, b = site_index(Dims(3, 3), np.array([[1, 1], [3, 3]]))
    assert D[a, b] == 4


def test_grid_to_graph_small():
    g = grid_to_graph("square", (2, 2), "nonperiodic")
    assert g.Z == 4 and g.n_edges == 4
    g = grid_to_graph("square", (2, 2), "periodic")
    assert g.Z == 4 and g.n_edges == 4
    h = grid_to_graph("hexagon", (5, 5), "nonperiodic")
    centre = int(site_index(Dims(5, 5), np.array([3, 3])))
    assert h.degrees()[centre] == 6
    u = grid_to_graph("square", (3, 3), "nonperiodic", metric="uniform")
    assert u.n_edges == 20


def test_pair_counts_path():
    lat = path3(occupied=[0, 2])
    counts = pair_counts_from_matrix(lat, build_distance_matrix(lat))
    assert counts.agents == {2: 1}
    assert counts.sites == {1: 2, 2: 1}
    assert counts.unreachable_agents == 0


def test_pair_counts_full_lattice():
    lat = grid_to_graph("hexagon", (4, 4), "nonperiodic")
    lat = lat.with_occupied(range(lat.Z))
    counts = pair_counts_from_matrix(lat, build_distance_matrix(lat))
    assert counts.agents == counts.sites


def test_disconnected_components():
    # triangle 0-1-2 and edge 3-4
    lat = GeneralLattice.from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)], occupied=[0, 1, 3])
    D = build_distance_matrix(lat)
    assert D[0, 3] == UNREACHABLE
    counts = pair_counts_from_matrix(lat, D)
    assert counts.unreachable_sites == 3 * 2
    assert counts.unreachable_agents == 2 * 1
    assert sum(counts.sites.values()) + counts.unreachable_sites == 5 * 4 // 2
    assert stream_pair_counts(lat) == counts
    p = graph_pcf(lat)
    assert p.meta["unreachable_site_pairs"] == 6


def test_pair_counts_dimension_check():
    with pytest.raises(GraphError):
        pair_counts_from_matrix(path3(), np.zeros((2, 2), dtype=int))


def test_lattice_validation():
    with pytest.raises(GraphError, match="self-loop"):
        GeneralLattice.from_edges(3, [(1, 1)])
    with pytest.raises(GraphError):
        GeneralLattice.from_edges(3, [(0, 3)])
    with pytest.raises(GraphError):
        GeneralLattice.from_edges(3, [], occupied=[5])
    lat = GeneralLattice.from_edges(3, [(1, 0), (0, 1), (1, 2)])
    assert lat.edges.tolist() == [[0, 1], [1, 2]]


def test_graph_pcf_full_and_errors():
    lat = grid_to_graph("triangle", (6, 4), "periodic")
    p = graph_pcf(lat.with_occupied(range(lat.Z)))
    assert set(p.f) == {1}
    with pytest.raises(PcfError):
        graph_pcf(lat.with_occupied([0]))


@pytest.mark.parametrize("kind, bc, dims", [
    ("square", "periodic", (6, 5)),
    ("hexagon", "nonperiodic", (5, 6)),
    ("cube", "periodic", (4, 4, 5)),
])
def test_graph_pcf_matches_native(kind, bc, dims, rng):
    for _ in range(5):
        grid = make_grid(kind, dims, bc, rng.random(Dims.of(dims).shape) < 0.4)
        native = pcf_profile(grid, "taxicab")
        general = graph_pcf(lattice_from_grid(grid), m_max=native.m[-1])
        assert (general.m, general.count, general.expected, general.f) == (
            native.m, native.count, native.expected, native.f)


def test_uniform_metric_graph_matches_native(rng):
    grid = make_grid("square", (6, 6), "nonperiodic", rng.random((6, 6)) < 0.5)
    native = pcf_profile(grid, "uniform")
    general = graph_pcf(lattice_from_grid(grid, "uniform"), m_max=native.m[-1])
    assert general.f == native.f


def test_bfs_matches_matrix_power_on_fixed_graphs():
    graphs = [
        (5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
        (6, [(0, 1), (0, 2), (0, 3), (4, 5)]),
        (1, []),
    ]
    for Z, edges in graphs:
        lat = GeneralLattice.from_edges(Z, edges)
        assert np.array_equal(build_distance_matrix(lat), matrix_power_distances(Z, edges))


# a hand-drawn map of 17 regions: a central region, an inner ring of 6, an outer ring of 10
REGIONS_17 = (
    [(0, k) for k in range(1, 7)]
    + [(k, k % 6 + 1) for k in range(1, 7)]
    + [(7 + k, 7 + (k + 1) % 10) for k in range(10)]
    + [(1, 7), (1, 8), (2, 9), (3, 10), (3, 11), (4, 12), (5, 13), (5, 14), (6, 15), (6, 16),
       (2, 8), (4, 11), (6, 7)]
)


def test_seventeen_region_map():
    lat = GeneralLattice.from_edges(17, REGIONS_17, occupied=[0, 2, 5, 8, 12, 16])
    D = build_distance_matrix(lat)
    assert np.array_equal(D, matrix_power_distances(17, REGIONS_17))
    # opposite outer regions meet through the centre: outer, inner, centre, inner, outer
    assert D.max() == 4 and D[0].max() == 2
    occ = lat.occupied.tolist()
    pairs = [(a, b) for i, a in enumerate(occ) for b in occ[i + 1:]]
    p = graph_pcf(lat)
    for m, c, e in zip(p.m, p.count, p.expected):
        assert c == sum(1 for a, b in pairs if D[a, b] == m)
        s = sum(1 for i in range(17) for j in range(i + 1, 17) if D[i, j] == m)
        assert e * 17 * 16 == 6 * 5 * s
