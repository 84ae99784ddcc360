"""PCFs on arbitrary site graphs using shortest-path (step) distance.

Vertices are 0-based in this API; the file formats in :mod:`latpcf.io`
use 1-based ids.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .lattice import (
    BoundaryKind,
    Dims,
    LatticeError,
    MetricKind,
    OccupancyGrid,
    TessellationKind,
    parse_enum,
    validate_dims,
)
from .metrics import check_metric, lattice_adjacency, site_index
from .norms import expected_pairs
from .pcf import PcfError, PcfProfile, build_profile

UNREACHABLE = -1
STREAM_THRESHOLD = 20_000  # above this many vertices no Z x Z matrix is built
_CHUNK = 1 << 23


class GraphError(LatticeError):
    """Malformed graph input."""


@dataclass(frozen=True, eq=False)
class GeneralLattice:
    """Undirected simple graph of sites plus an occupied vertex set.

    ``edges`` is an ``(E, 2)`` array of 0-based pairs ``i < j``, sorted and
    unique; ``occupied`` a sorted array of vertex ids.
    """

    Z: int
    edges: np.ndarray
    occupied: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict)
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        Z = int(self.Z)
        if Z < 1:
            raise GraphError("a lattice needs at least one vertex")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= Z:
                bad = edges[(edges < 0).any(axis=1) | (edges >= Z).any(axis=1)][0]
                raise GraphError(f"edge {tuple(bad.tolist())} has a vertex outside 0..{Z - 1}")
            loops = edges[:, 0] == edges[:, 1]
            if loops.any():
                raise GraphError(f"self-loop at vertex {int(edges[loops][0, 0])}")
            edges = np.unique(np.sort(edges, axis=1), axis=0)
        occ = np.unique(np.asarray(self.occupied, dtype=np.int64).ravel())
        if occ.size and (occ.min() < 0 or occ.max() >= Z):
            raise GraphError(f"occupied vertex outside 0..{Z - 1}")
        for arr in (edges, occ):
            arr.flags.writeable = False
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "occupied", occ)
        object.__setattr__(self, "meta", dict(self.meta))

    @classmethod
    def from_edges(cls, Z: int, edges: Iterable, occupied: Iterable = (), meta=None,
                   points=None) -> "GeneralLattice":
        edges = np.array(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        return cls(Z, edges, np.array(list(occupied), dtype=np.int64), meta or {}, points)

    @property
    def n_agents(self) -> int:
        return int(self.occupied.size)

    @property
    def n_edges(self) -> int:
        return int(len(self.edges))

    def adjacency(self) -> csr_matrix:
        e = self.edges
        data = np.ones(2 * len(e), dtype=np.int8)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return csr_matrix((data, (rows, cols)), shape=(self.Z, self.Z))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.Z)

    def neighbors(self, v: int) -> np.ndarray:
        adj = self.adjacency()
        return adj.indices[adj.indptr[v]:adj.indptr[v + 1]]

    def with_occupied(self, occupied: Iterable, **meta) -> "GeneralLattice":
        occ = np.array(list(occupied) if not isinstance(occupied, np.ndarray) else occupied,
                       dtype=np.int64)
        return GeneralLattice(self.Z, self.edges, occ, {**self.meta, **meta}, self.points)

    def density(self) -> Fraction:
        return Fraction(self.n_agents, self.Z)

    def __eq__(self, other):
        if not isinstance(other, GeneralLattice):
            return NotImplemented
        return (
            self.Z == other.Z
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.occupied, other.occupied)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"GeneralLattice(Z={self.Z}, E={self.n_edges}, N={self.n_agents})"


def _bfs_rows(adj: csr_matrix, sources: np.ndarray) -> np.ndarray:
    dist = shortest_path(adj, directed=False, unweighted=True, indices=sources)
    dist = np.atleast_2d(dist)
    return np.where(np.isinf(dist), UNREACHABLE, dist).astype(np.int64)


def build_distance_matrix(lattice: GeneralLattice) -> np.ndarray:
    """All-pairs step distances; ``UNREACHABLE`` (-1) marks disconnected pairs."""
    if lattice.Z > STREAM_THRESHOLD:
        raise GraphError(
            f"Z={lattice.Z} exceeds {STREAM_THRESHOLD}; use graph_pcf, which streams the counts"
        )
    return _bfs_rows(lattice.adjacency(), np.arange(lattice.Z))


@dataclass(frozen=True)
class GraphPairCounts:
    agents: Dict[int, int]
    sites: Dict[int, int]
    unreachable_agents: int = 0
    unreachable_sites: int = 0


def _upper_histogram(rows: np.ndarray, row_ids: np.ndarray, col_ids: np.ndarray) -> Tuple[Counter, int]:
    mask = col_ids[None, :] > row_ids[:, None]
    vals = rows[mask]
    hist = Counter()
    uniq, cnt = np.unique(vals, return_counts=True)
    lost = 0
    for u, c in zip(uniq.tolist(), cnt.tolist()):
        if u == UNREACHABLE:
            lost += c
        else:
            hist[u] += c
    return hist, lost


def pair_counts_from_matrix(lattice: GeneralLattice, D: np.ndarray) -> GraphPairCounts:
    """Unordered agent and site pairs per finite distance, plus unreachable pairs."""
    D = np.asarray(D)
    if D.shape != (lattice.Z, lattice.Z):
        raise GraphError(f"distance matrix shape {D.shape} does not match Z={lattice.Z}")
    every = np.arange(lattice.Z)
    s, s_lost = _upper_histogram(D, every, every)
    occ = lattice.occupied
    c, c_lost = _upper_histogram(D[np.ix_(occ, occ)], np.arange(occ.size), np.arange(occ.size))
    return GraphPairCounts(
        {m: n for m, n in sorted(c.items()) if m > 0},
        {m: n for m, n in sorted(s.items()) if m > 0},
        c_lost,
        s_lost,
    )


def stream_pair_counts(lattice: GeneralLattice) -> GraphPairCounts:
    """Same as :func:`pair_counts_from_matrix` without materialising the matrix."""
    adj = lattice.adjacency()
    Z = lattice.Z
    occ = lattice.occupied
    is_occ = np.zeros(Z, dtype=bool)
    is_occ[occ] = True
    s, c = Counter(), Counter()
    s_lost = c_lost = 0
    rows = max(1, _CHUNK // Z)
    for start in range(0, Z, rows):
        src = np.arange(start, min(Z, start + rows))
        d = _bfs_rows(adj, src)
        hist, lost = _upper_histogram(d, src, np.arange(Z))
        s.update(hist)
        s_lost += lost
        osrc = src[is_occ[src]]
        if osrc.size:
            sub = d[is_occ[src]][:, occ]
            hist, lost = _upper_histogram(sub, osrc, occ)
            c.update(hist)
            c_lost += lost
    return GraphPairCounts(
        {m: n for m, n in sorted(c.items()) if m > 0},
        {m: n for m, n in sorted(s.items()) if m > 0},
        c_lost,
        s_lost,
    )


def graph_pcf(lattice: GeneralLattice, m_max: Optional[int] = None) -> PcfProfile:
    """General PCF over every distance ``m`` with at least one site pair."""
    N = lattice.n_agents
    if N < 2:
        raise PcfError(f"PCF undefined: zero expected pairs (N={N})")
    counts = stream_pair_counts(lattice)
    Z = lattice.Z
    expected = {
        m: expected_pairs(N, Z, s)
        for m, s in counts.sites.items()
        if s > 0 and (m_max is None or m <= m_max)
    }
    meta = dict(lattice.meta)
    meta.update(
        kind="graph",
        metric=MetricKind.GRAPH.value,
        bc="none",
        dims=f"Z={Z}",
        N=N,
        unreachable_agent_pairs=counts.unreachable_agents,
        unreachable_site_pairs=counts.unreachable_sites,
    )
    return build_profile(counts.agents, expected, meta)


def grid_to_graph(kind, dims, bc, metric="taxicab") -> GeneralLattice:
    """Lattice sites as graph vertices (canonical order), joined at distance one."""
    kind = parse_enum(TessellationKind, kind)
    bc = parse_enum(BoundaryKind, bc)
    metric = parse_enum(MetricKind, metric)
    dims = Dims.of(dims)
    validate_dims(kind, dims, bc)
    check_metric(kind, metric)
    if metric not in (MetricKind.TAXICAB, MetricKind.UNIFORM):
        raise GraphError(f"{metric.value} has no neighbourhood graph")
    adj = lattice_adjacency(kind, bc, dims, metric).tocoo()
    keep = adj.row < adj.col
    edges = np.stack([adj.row[keep], adj.col[keep]], axis=1)
    meta = {"source": f"{kind.value}/{metric.value}/{bc.value} {dims}"}
    return GeneralLattice(dims.size, edges, np.empty(0, dtype=np.int64), meta)


def grid_occupied_ids(grid: OccupancyGrid) -> np.ndarray:
    """Vertex ids (canonical site indices) of the occupied sites of ``grid``."""
    from .lattice import agent_array

    return np.sort(site_index(grid.dims, agent_array(grid)))


def lattice_from_grid(grid: OccupancyGrid, metric="taxicab") -> GeneralLattice:
    """Graph of ``grid`` carrying its occupancy."""
    g = grid_to_graph(grid.kind, grid.dims, grid.bc, metric)
    return g.with_occupied(grid_occupied_ids(grid))
