"""Seeded and deterministic occupancy generators.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``; the same
parameters and seed always give the same output.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .graph import GeneralLattice
from .lattice import (
    BoundaryKind,
    Dims,
    LatticeError,
    OccupancyGrid,
    TessellationKind,
    make_grid,
    parse_enum,
)

PROLIFERATION_DIMS = (100, 100)
PROLIFERATION_START = tuple((x, y) for y in (20, 40, 60, 80) for x in (20, 40, 60, 80))
MAX_REPERTURB = 16


class PatternError(LatticeError):
    """Invalid generator parameters or a process that cannot reach its target."""


def rng_for(seed) -> np.random.Generator:
    if seed is None:
        raise PatternError("stochastic generators need an explicit seed")
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise PatternError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def _fraction(value, name: str) -> Fraction:
    try:
        value = Fraction(value) if not isinstance(value, float) else Fraction(str(value))
    except (TypeError, ValueError):
        raise PatternError(f"{name} must be a number, got {value!r}") from None
    return value


def agent_count(density, Z: int) -> int:
    """``round(density * Z)`` with halves rounded up."""
    density = _fraction(density, "density")
    if not 0 <= density <= 1:
        raise PatternError(f"density {density} outside [0, 1]")
    return int(math.floor(density * Z + Fraction(1, 2)))


def gen_uniform_random(kind, dims, bc, density, seed) -> OccupancyGrid:
    """Exactly ``round(density * Z)`` sites, chosen uniformly without replacement."""
    grid = make_grid(kind, dims, bc)
    Z = grid.n_sites
    N = agent_count(density, Z)
    rng = rng_for(seed)
    # prefix of a Fisher-Yates shuffle of the canonical site order
    chosen = rng.permutation(Z)[:N]
    occ = np.zeros(Z, dtype=bool)
    occ[chosen] = True
    meta = {"generator": "uniform", "density": str(_fraction(density, "density")), "seed": int(seed)}
    return make_grid(grid.kind, grid.dims, grid.bc, occ.reshape(grid.dims.shape), meta)


def _coords(dims: Dims) -> Tuple[np.ndarray, np.ndarray]:
    y, x = np.indices(dims.shape) + 1
    return x, y


def _floor_div_sqrt(d2q: np.ndarray, spacing: Fraction) -> np.ndarray:
    """``floor(sqrt(d2q / 4) / spacing)`` with an exact boundary fix-up."""
    k = np.floor(np.sqrt(d2q / 4.0) / float(spacing)).astype(np.int64)
    num, den = spacing.numerator, spacing.denominator
    # k*s <= d  <=>  4 k^2 num^2 <= d2q den^2
    lhs = lambda kk: 4 * kk * kk * num * num  # noqa: E731
    rhs = d2q * den * den
    k = np.where(lhs(k) > rhs, k - 1, k)
    k = np.where(lhs(k + 1) <= rhs, k + 1, k)
    return k


def gen_deterministic_pattern(pattern: str, dims, bc="nonperiodic", width: int = 1,
                              spacing=1) -> OccupancyGrid:
    """Chessboard, diagonal stripes of ``width`` or concentric circles of ``spacing``."""
    dims = Dims.of(dims)
    bc = parse_enum(BoundaryKind, bc)
    if dims.Lz is not None:
        raise PatternError("deterministic patterns are two-dimensional")
    x, y = _coords(dims)
    name = pattern.lower().replace("_", "-")
    meta = {"generator": name}
    if name == "chessboard":
        if dims.Lx % 2 or dims.Ly % 2:
            raise PatternError(f"a chessboard needs even extents, got {dims}")
        occ = (x + y) % 2 == 0
    elif name in ("stripes", "diagonal-stripes"):
        if int(width) != width or width < 1:
            raise PatternError(f"stripe width must be a positive integer, got {width!r}")
        w = int(width)
        occ = ((x + y) % (2 * w)) // w == 0
        meta["width"] = w
    elif name in ("circles", "concentric-circles"):
        s = _fraction(spacing, "spacing")
        if s <= 0:
            raise PatternError(f"circle spacing must be positive, got {spacing!r}")
        # squared distance to the centre, times 4 to stay integral
        d2q = (2 * x - dims.Lx - 1) ** 2 + (2 * y - dims.Ly - 1) ** 2
        occ = _floor_div_sqrt(d2q.astype(np.int64), s) % 2 == 0
        meta["spacing"] = str(s)
    else:
        raise PatternError(f"unknown pattern {pattern!r}; expected chessboard, stripes or circles")
    return make_grid(TessellationKind.SQUARE, dims, bc, occ, meta)


_VON_NEUMANN = np.array([(-1, 0), (1, 0), (0, -1), (0, 1)], dtype=np.int64)


def gen_proliferation(steps: int, seed, dims=PROLIFERATION_DIMS,
                      start: Sequence[Tuple[int, int]] = PROLIFERATION_START) -> OccupancyGrid:
    """Proliferation on a periodic square lattice.

    Each step makes ``n(t)`` attempts. An attempt picks an agent from those
    present at the start of the step, then one of its four von Neumann
    neighbours, and fills that site if it is empty.
    """
    if int(steps) != steps or steps < 0:
        raise PatternError(f"steps must be a non-negative integer, got {steps!r}")
    dims = Dims.of(dims)
    grid = make_grid(TessellationKind.SQUARE, dims, BoundaryKind.PERIODIC)
    rng = rng_for(seed)
    Lx, Ly = dims.Lx, dims.Ly
    occ = np.zeros(dims.shape, dtype=bool)
    for x, y in start:
        occ[y - 1, x - 1] = True
    for _ in range(int(steps)):
        ys, xs = np.nonzero(occ)
        n = len(xs)
        pick = rng.integers(0, n, size=n)
        move = _VON_NEUMANN[rng.integers(0, 4, size=n)]
        tx = (xs[pick] + move[:, 0]) % Lx
        ty = (ys[pick] + move[:, 1]) % Ly
        # an attempt on an occupied site changes nothing, so attempt order is irrelevant
        occ[ty, tx] = True
    meta = {"generator": "proliferation", "steps": int(steps), "seed": int(seed)}
    return make_grid(grid.kind, dims, grid.bc, occ, meta)


def _lattice_points(dims: Dims, jitter: float, rng: np.random.Generator) -> np.ndarray:
    x, y = _coords(dims)
    pts = np.stack([x.ravel(), y.ravel()], axis=1).astype(float)
    if jitter:
        pts += rng.uniform(-jitter / 2, jitter / 2, size=pts.shape)
    return pts


def delaunay_edges(points: np.ndarray) -> np.ndarray:
    """Unique Delaunay edges ``i < j`` of a 2D point set."""
    tri = Delaunay(points)
    s = tri.simplices
    e = np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]])
    return np.unique(np.sort(e, axis=1), axis=0)


def gen_voronoi_lattice(grid_dims, jitter=1.0, seed=None) -> GeneralLattice:
    """Voronoi-cell adjacency of a unit-spaced point lattice with uniform jitter.

    Each point moves by independent offsets drawn from
    ``[-jitter/2, jitter/2]`` per axis. Two cells are adjacent when their
    points share a Delaunay edge. If the triangulation fails the points are
    redrawn from the continuing random stream; the number of redraws is
    stored under ``meta["reperturbations"]``.
    """
    dims = Dims.of(grid_dims)
    if dims.Lz is not None or dims.Lx < 3 or dims.Ly < 3:
        raise PatternError(f"Voronoi lattices need a 2D point grid of at least 3x3, got {dims}")
    jitter = float(jitter)
    if jitter < 0:
        raise PatternError("jitter must be non-negative")
    rng = rng_for(seed)
    for attempt in range(MAX_REPERTURB + 1):
        pts = _lattice_points(dims, jitter, rng)
        try:
            edges = delaunay_edges(pts)
        except QhullError:
            if not jitter:
                raise PatternError("the unperturbed point grid could not be triangulated") from None
            continue
        break
    else:  # pragma: no cover
        raise PatternError("could not triangulate the perturbed points")
    meta = {
        "generator": "voronoi",
        "grid": str(dims),
        "jitter": jitter,
        "seed": int(seed),
        "reperturbations": attempt,
    }
    return GeneralLattice(dims.size, edges, np.empty(0, dtype=np.int64), meta, pts)


def _adjacency_lists(lattice: GeneralLattice):
    adj = lattice.adjacency()
    return [adj.indices[adj.indptr[v]:adj.indptr[v + 1]] for v in range(lattice.Z)]


def gen_aggregated(lattice: GeneralLattice, target_density, seed) -> GeneralLattice:
    """Fill a random empty site and its neighbours until the density reaches the target.

    Stops at the first step whose density is at or above the target.
    """
    target = _fraction(target_density, "target density")
    if not 0 < target <= 1:
        raise PatternError(f"target density {target} outside (0, 1]")
    rng = rng_for(seed)
    nbrs = _adjacency_lists(lattice)
    occ = np.zeros(lattice.Z, dtype=bool)
    occ[lattice.occupied] = True
    need = math.ceil(target * lattice.Z)
    filled = int(occ.sum())
    steps = 0
    while filled < need:
        empty = np.flatnonzero(~occ)
        v = empty[rng.integers(0, empty.size)]
        block = np.append(nbrs[v], v)
        filled += int((~occ[block]).sum())
        occ[block] = True
        steps += 1
    return lattice.with_occupied(
        np.flatnonzero(occ), generator="aggregated", target_density=str(target),
        seed=int(seed), steps=steps, stop_rule="first crossing at or above target",
    )


def gen_segregated(lattice: GeneralLattice, target_density, seed,
                   start_full: bool = True) -> GeneralLattice:
    """Clear the occupied neighbours of random occupied sites until the density drops to the target.

    Sites are drawn from the occupied sites that still have an occupied
    neighbour; drawing any other occupied site changes nothing, so this is
    the plain process with the idle draws skipped. Stops at the first step
    whose density is at or below the target.
    """
    target = _fraction(target_density, "target density")
    if not 0 < target < 1:
        raise PatternError(f"target density {target} outside (0, 1)")
    rng = rng_for(seed)
    nbrs = _adjacency_lists(lattice)
    occ = np.ones(lattice.Z, dtype=bool)
    if not start_full:
        occ[:] = False
        occ[lattice.occupied] = True
    limit = math.floor(target * lattice.Z)
    filled = int(occ.sum())
    adj = lattice.adjacency().astype(np.int32)
    steps = 0
    while filled > limit:
        busy = occ & (adj @ occ.astype(np.int32) > 0)
        live = np.flatnonzero(busy)
        if live.size == 0:
            raise PatternError(
                f"segregation stalled at density {filled}/{lattice.Z} = "
                f"{filled / lattice.Z:.4f} above the target {float(target):.4f}"
            )
        v = live[rng.integers(0, live.size)]
        hit = nbrs[v][occ[nbrs[v]]]
        occ[hit] = False
        filled -= hit.size
        steps += 1
    return lattice.with_occupied(
        np.flatnonzero(occ), generator="segregated", target_density=str(target),
        seed=int(seed), steps=steps, stop_rule="first crossing at or below target",
    )
