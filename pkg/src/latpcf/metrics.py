"""Pairwise distances and agent-pair histograms.

All histograms count *unordered* pairs: ``c[m]`` is the number of agent
pairs ``{a, b}`` with ``a != b`` at distance ``m``.

Square and cube distances are computed from per-axis offsets (wrapped to
``min(|d|, L - |d|)`` under periodic boundaries). Triangle and hexagon
distances are breadth-first step counts over the lattice adjacency.
"""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

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
    agent_array,
    check_coord,
    distance_domain,
    parse_enum,
    validate_dims,
)

PairCounts = Dict[int, int]

_CHUNK = 1 << 22  # pair-distance entries evaluated per numpy block

SQUARE, TRIANGLE, HEXAGON, CUBE = (
    TessellationKind.SQUARE,
    TessellationKind.TRIANGLE,
    TessellationKind.HEXAGON,
    TessellationKind.CUBE,
)
TAXICAB, UNIFORM, ANNULAR = MetricKind.TAXICAB, MetricKind.UNIFORM, MetricKind.ANNULAR


def check_metric(kind: TessellationKind, metric: MetricKind) -> None:
    if metric is MetricKind.GRAPH:
        raise LatticeError("the graph metric applies to GeneralLattice inputs, not grids")
    if kind in (TRIANGLE, HEXAGON):
        if metric is not TAXICAB:
            raise LatticeError(f"{kind.value} lattices support only the taxicab (step) metric")
    elif kind is CUBE and metric not in (TAXICAB, UNIFORM):
        raise LatticeError(f"{metric.value} is not defined on cube lattices")


def _step_offsets(kind: TessellationKind, x: int, y: int):
    if kind is TRIANGLE:
        # up-pointing iff x + y even; the third edge crosses the flat side
        third = (x, y - 1) if (x + y) % 2 == 0 else (x, y + 1)
        return [(x - 1, y), (x + 1, y), third]
    # hexagons: rows of Lx cells, odd columns sit half a cell above even ones
    dy = 1 if x % 2 else -1
    return [
        (x, y - 1), (x, y + 1),
        (x - 1, y), (x + 1, y),
        (x - 1, y + dy), (x + 1, y + dy),
    ]


def _box_offsets(ndim: int, metric: MetricKind):
    out = []
    for d in np.ndindex(*([3] * ndim)):
        d = tuple(v - 1 for v in d)
        if any(d) and (metric is UNIFORM or sum(map(abs, d)) == 1):
            out.append(d)
    return out


def neighbor_list(kind, bc, dims, a, metric=MetricKind.TAXICAB) -> list:
    """Distance-one neighbours of site ``a``, deduplicated, in canonical order.

    ``metric`` only matters for square and cube lattices (von Neumann for
    taxicab, Moore for uniform).
    """
    kind = parse_enum(TessellationKind, kind)
    bc = parse_enum(BoundaryKind, bc)
    metric = parse_enum(MetricKind, metric)
    dims = Dims.of(dims)
    validate_dims(kind, dims, bc)
    a = check_coord(dims, a)
    if kind in (TRIANGLE, HEXAGON):
        candidates = _step_offsets(kind, *a)
    else:
        if metric not in (TAXICAB, UNIFORM):
            raise LatticeError(f"no neighbourhood defined for {metric.value}")
        candidates = [tuple(c + d for c, d in zip(a, off)) for off in _box_offsets(len(a), metric)]
    periodic = bc is BoundaryKind.PERIODIC
    seen = set()
    for c in candidates:
        if periodic:
            c = tuple((v - 1) % L + 1 for v, L in zip(c, dims.extents))
        elif not all(1 <= v <= L for v, L in zip(c, dims.extents)):
            continue
        if c != a:
            seen.add(c)
    return sorted(seen, key=lambda c: c[::-1])


def site_index(dims: Dims, coords: np.ndarray) -> np.ndarray:
    """Canonical 0-based site index of 1-based coordinates (``(..., ndim)`` array)."""
    coords = np.asarray(coords, dtype=np.int64) - 1
    idx = np.zeros(coords.shape[:-1], dtype=np.int64)
    stride = 1
    for axis, L in enumerate(dims.extents):
        idx += coords[..., axis] * stride
        stride *= L
    return idx


@lru_cache(maxsize=64)
def lattice_adjacency(kind: TessellationKind, bc: BoundaryKind, dims: Dims,
                      metric: MetricKind = TAXICAB) -> csr_matrix:
    """Symmetric 0/1 adjacency of the lattice sites in canonical order.

    ``metric`` picks the von Neumann (taxicab) or Moore (uniform)
    neighbourhood on square and cube lattices.
    """
    from .lattice import all_sites

    sites = all_sites(dims)
    rows, cols = [], []
    for i, site in enumerate(sites):
        for nb in neighbor_list(kind, bc, dims, tuple(int(v) for v in site), metric):
            rows.append(i)
            cols.append(int(site_index(dims, np.array(nb))))
    Z = dims.size
    data = np.ones(len(rows), dtype=np.int8)
    adj = csr_matrix((data, (rows, cols)), shape=(Z, Z))
    adj.sum_duplicates()
    adj.data[:] = 1
    return adj


def step_distances(kind, bc, dims, sources) -> np.ndarray:
    """Breadth-first step distances from each source site index to every site.

    Returns an ``(len(sources), Z)`` integer array; unreachable sites are -1
    (never the case on the connected regular lattices).
    """
    adj = lattice_adjacency(kind, bc, dims)
    dist = shortest_path(adj, directed=False, unweighted=True, indices=np.asarray(sources))
    dist = np.atleast_2d(dist)
    out = np.where(np.isinf(dist), -1, dist).astype(np.int64)
    return out


@lru_cache(maxsize=4096)
def _step_row(kind, bc, dims, source: int) -> np.ndarray:
    row = step_distances(kind, bc, dims, [source])[0]
    row.flags.writeable = False
    return row


def axis_offsets(dims: Dims, bc: BoundaryKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-axis absolute offsets between coordinate arrays, wrapped if periodic."""
    d = np.abs(np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64))
    if bc is BoundaryKind.PERIODIC:
        L = np.asarray(dims.extents, dtype=np.int64)
        d = np.minimum(d, L - d)
    return d


def _combine(offsets: np.ndarray, metric: MetricKind) -> np.ndarray:
    if metric is TAXICAB:
        return offsets.sum(axis=-1)
    if metric is UNIFORM:
        return offsets.max(axis=-1)
    if metric is ANNULAR:
        return (offsets * offsets).sum(axis=-1)
    if metric is MetricKind.RECTILINEAR_X:
        return offsets[..., 0]
    if metric is MetricKind.RECTILINEAR_Y:
        return offsets[..., 1]
    raise LatticeError(f"unsupported metric {metric.value}")


def pair_distance(kind, metric, bc, dims, a, b):
    """Distance between sites ``a`` and ``b``.

    Integer for every metric except annular, which returns the (wrapped)
    Euclidean length as a float.
    """
    kind = parse_enum(TessellationKind, kind)
    metric = parse_enum(MetricKind, metric)
    bc = parse_enum(BoundaryKind, bc)
    dims = Dims.of(dims)
    validate_dims(kind, dims, bc)
    check_metric(kind, metric)
    a = check_coord(dims, a)
    b = check_coord(dims, b)
    if kind in (TRIANGLE, HEXAGON):
        ia, ib = (int(site_index(dims, np.array(c))) for c in (a, b))
        return int(_step_row(kind, bc, dims, ia)[ib])
    value = int(_combine(axis_offsets(dims, bc, np.array(a), np.array(b)), metric))
    if metric is ANNULAR:
        return math.sqrt(value)
    return value


def pairwise_distances(kind, metric, bc, dims, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix between two coordinate arrays.

    Annular distances are returned *squared* (exact integers).
    """
    kind = parse_enum(TessellationKind, kind)
    metric = parse_enum(MetricKind, metric)
    bc = parse_enum(BoundaryKind, bc)
    dims = Dims.of(dims)
    check_metric(kind, metric)
    a = np.atleast_2d(np.asarray(a, dtype=np.int64))
    b = np.atleast_2d(np.asarray(b, dtype=np.int64))
    if kind in (TRIANGLE, HEXAGON):
        rows = step_distances(kind, bc, dims, site_index(dims, a))
        return rows[:, site_index(dims, b)]
    return _combine(axis_offsets(dims, bc, a[:, None, :], b[None, :, :]), metric)


def _upper_pair_histogram(kind, metric, bc, dims, points: np.ndarray) -> Counter:
    """Histogram of distances over unordered pairs ``i < j`` of ``points``."""
    n = len(points)
    hist = Counter()
    if n < 2:
        return hist
    rows = max(1, _CHUNK // n)
    for start in range(0, n - 1, rows):
        stop = min(n - 1, start + rows)
        d = pairwise_distances(kind, metric, bc, dims, points[start:stop], points[start:])
        i = np.arange(stop - start)[:, None]
        j = np.arange(n - start)[None, :]
        vals = d[j > i]
        if metric is not ANNULAR and vals.size and vals.min() < 0:
            raise LatticeError("disconnected lattice sites")
        uniq, cnt = np.unique(vals, return_counts=True)
        for u, c in zip(uniq.tolist(), cnt.tolist()):
            hist[u] += c
    return hist


def _padded(grid: OccupancyGrid, pad: Sequence[int]) -> np.ndarray:
    # array axes are reversed relative to coordinate axes
    widths = [(p, p) for p in reversed(pad)]
    mode = "wrap" if grid.bc is BoundaryKind.PERIODIC else "constant"
    return np.pad(grid.occupancy, widths, mode=mode)


def offset_pair_counts(grid: OccupancyGrid, bounds: Sequence[int]) -> Dict[Tuple[int, ...], int]:
    """Ordered agent-pair counts per displacement vector.

    Walks every displacement ``d != 0`` with ``|d_i| <= bounds[i]`` and
    counts occupied sites ``a`` with ``a + d`` also occupied. Under periodic
    boundaries each residue class is visited once: components are taken in
    ``(-L/2, L/2]``, so ``bounds`` must not exceed ``L // 2``.
    """
    extents = grid.dims.extents
    periodic = grid.bc is BoundaryKind.PERIODIC
    if periodic and any(b > L // 2 for b, L in zip(bounds, extents)):
        raise LatticeError("periodic offset bounds must not exceed half the extent")
    bounds = [min(b, L - 1) for b, L in zip(bounds, extents)]
    padded = _padded(grid, bounds)
    occ = grid.occupancy
    ranges = []
    for b, L in zip(bounds, extents):
        lo = -b
        if periodic and 2 * b == L:
            lo = -b + 1  # -L/2 and +L/2 are the same residue
        ranges.append(range(lo, b + 1))
    out = {}
    for d in np.ndindex(*[len(r) for r in ranges]):
        vec = tuple(r[k] for r, k in zip(ranges, d))
        if not any(vec):
            continue
        sl = tuple(
            slice(b + v, b + v + L)
            for v, b, L in zip(reversed(vec), reversed(bounds), reversed(extents))
        )
        count = int(np.count_nonzero(occ & padded[sl]))
        if count:
            out[vec] = count
    return out


def _histogram_from_offsets(table, metric: MetricKind) -> Counter:
    hist = Counter()
    for vec, count in table.items():
        off = np.abs(np.array(vec))
        hist[int(_combine(off, metric))] += count
    # ordered -> unordered
    return Counter({m: c // 2 for m, c in hist.items()})


def count_agent_pairs(grid: OccupancyGrid, metric, method: str = "pairs",
                      m_max: Optional[int] = None) -> PairCounts:
    """Unordered agent-pair counts ``c(m)``.

    ``method="pairs"`` enumerates every agent pair (O(N^2)) and returns the
    full histogram. ``method="local"`` walks displacement vectors up to
    ``m_max`` (default: the distance domain) for square and cube lattices and
    returns counts for ``1 <= m <= m_max`` only.
    """
    metric = parse_enum(MetricKind, metric)
    check_metric(grid.kind, metric)
    if metric is ANNULAR:
        raise LatticeError("use annular_bin_counts for the annular metric")
    if method == "pairs":
        hist = _upper_pair_histogram(grid.kind, metric, grid.bc, grid.dims, agent_array(grid))
        return {
            m: c for m, c in sorted(hist.items()) if m > 0 and (m_max is None or m <= m_max)
        }
    if method != "local":
        raise LatticeError(f"unknown counting method {method!r}")
    if grid.kind in (TRIANGLE, HEXAGON):
        return _step_counts_local(grid, m_max)
    if metric not in (TAXICAB, UNIFORM):
        raise LatticeError("the local path supports taxicab and uniform metrics")
    if m_max is None:
        m_max = distance_domain(grid.kind, metric, grid.bc, grid.dims).m_max
    table = offset_pair_counts(grid, [m_max] * grid.kind.ndim)
    hist = _histogram_from_offsets(table, metric)
    return {m: hist.get(m, 0) for m in range(1, m_max + 1)}


def _step_counts_local(grid: OccupancyGrid, m_max: Optional[int]) -> PairCounts:
    if m_max is None:
        m_max = distance_domain(grid.kind, TAXICAB, grid.bc, grid.dims).m_max
    pts = agent_array(grid)
    ids = site_index(grid.dims, pts)
    hist = Counter()
    n = len(ids)
    rows = max(1, _CHUNK // max(grid.n_sites, 1))
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        d = step_distances(grid.kind, grid.bc, grid.dims, ids[start:stop])[:, ids]
        i = np.arange(start, stop)[:, None]
        j = np.arange(n)[None, :]
        vals = d[(j > i) & (d >= 1) & (d <= m_max)]
        for u, c in zip(*np.unique(vals, return_counts=True)):
            hist[int(u)] += int(c)
    return {m: hist.get(m, 0) for m in range(1, m_max + 1)}


def annular_bin(d2: int, delta) -> int:
    """Bin ``k`` with ``k*delta - delta < sqrt(d2) <= k*delta`` (exact)."""
    delta = Fraction(delta)
    if delta <= 0:
        raise LatticeError("annular bandwidth must be positive")
    if d2 <= 0:
        return 0
    k = max(1, math.ceil(math.sqrt(d2) / float(delta)))
    while (k - 1) > 0 and (k - 1) ** 2 * delta * delta >= d2:
        k -= 1
    while k * k * delta * delta < d2:
        k += 1
    return k


def _bins_from_squared(hist: Counter, delta) -> Counter:
    out = Counter()
    for d2, count in hist.items():
        if d2 > 0:
            out[annular_bin(int(d2), delta)] += count
    return out


def annular_bin_counts(grid: OccupancyGrid, delta, bc=None, k_max: Optional[int] = None,
                       method: str = "pairs") -> PairCounts:
    """Unordered agent pairs binned by Euclidean distance into ``(k*delta - delta, k*delta]``.

    With ``k_max`` the result holds bins ``1..k_max`` (zeros included);
    otherwise every non-empty bin up to the largest distance.
    """
    if grid.kind is not SQUARE:
        raise LatticeError("the annular metric is defined on square lattices only")
    if bc is not None:
        grid = grid.with_bc(bc)
    if Fraction(delta) <= 0:
        raise LatticeError("annular bandwidth must be positive")
    if method == "local":
        if k_max is None:
            raise LatticeError("the local annular path needs k_max")
        reach = int(math.floor(k_max * Fraction(delta)))
        table = offset_pair_counts(grid, [reach] * 2)
        d2 = Counter()
        for vec, count in table.items():
            d2[vec[0] ** 2 + vec[1] ** 2] += count
        hist = Counter({k: v // 2 for k, v in d2.items()})
    else:
        hist = _upper_pair_histogram(grid.kind, ANNULAR, grid.bc, grid.dims, agent_array(grid))
    bins = _bins_from_squared(hist, delta)
    if k_max is None:
        top = max(bins, default=0)
    else:
        top = k_max
    return {k: bins.get(k, 0) for k in range(1, top + 1)}


def rectilinear_counts(grid: OccupancyGrid) -> Tuple[PairCounts, PairCounts]:
    """Unordered agent pairs by column offset and by row offset (``m >= 1``)."""
    if grid.kind is not SQUARE:
        raise LatticeError("rectilinear counts are defined on square lattices only")
    if grid.bc is not BoundaryKind.NONPERIODIC:
        raise LatticeError("rectilinear counts are defined for non-periodic boundaries only")
    occ = grid.occupancy.astype(np.int64)
    cols = occ.sum(axis=0)  # agents per x
    rows = occ.sum(axis=1)  # agents per y

    def lagged(v):
        return {m: int(np.dot(v[:-m], v[m:])) for m in range(1, len(v))}

    return lagged(cols), lagged(rows)
