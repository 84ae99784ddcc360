"""Discrete domains with exclusion occupancy.

Sites are addressed by 1-based coordinates ``(x, y)`` or ``(x, y, z)``.
The occupancy array is stored image-style, i.e. with shape ``(Ly, Lx)`` or
``(Lz, Ly, Lx)`` and indexed ``[y-1, x-1]`` / ``[z-1, y-1, x-1]``, so that
C-order traversal of the array is the canonical (row-major, then layer)
site order.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

Coord = Tuple[int, ...]


class LatticeError(ValueError):
    """Invalid lattice parameters, coordinates or metric combinations."""


class TessellationKind(enum.Enum):
    SQUARE = "square"
    TRIANGLE = "triangle"
    HEXAGON = "hexagon"
    CUBE = "cube"

    @property
    def ndim(self) -> int:
        return 3 if self is TessellationKind.CUBE else 2


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    NONPERIODIC = "nonperiodic"


class MetricKind(enum.Enum):
    TAXICAB = "taxicab"
    UNIFORM = "uniform"
    ANNULAR = "annular"
    RECTILINEAR_X = "rectilinear-x"
    RECTILINEAR_Y = "rectilinear-y"
    GRAPH = "graph"


def parse_enum(cls, value):
    """Accept an enum member or its string value (case-insensitive)."""
    if isinstance(value, cls):
        return value
    text = str(value).strip().lower().replace("_", "-")
    aliases = {"non-periodic": "nonperiodic", "chebyshev": "uniform"}
    text = aliases.get(text, text)
    for member in cls:
        if member.value == text:
            return member
    choices = ", ".join(m.value for m in cls)
    raise LatticeError(f"unknown {cls.__name__} {value!r}; expected one of {choices}")


@dataclass(frozen=True)
class Dims:
    Lx: int
    Ly: int
    Lz: Optional[int] = None

    def __post_init__(self):
        for name in ("Lx", "Ly", "Lz"):
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, bool) or int(value) != value:
                raise LatticeError(f"{name} must be an integer, got {value!r}")
            if value < 2:
                raise LatticeError(f"{name}={value} is too small; every extent must be >= 2")

    @classmethod
    def of(cls, value) -> "Dims":
        """Build from a ``Dims``, a tuple ``(Lx, Ly[, Lz])`` or a string ``"LxxLy[xLz]"``."""
        if isinstance(value, Dims):
            return value
        if isinstance(value, str):
            parts = value.lower().replace("*", "x").split("x")
            try:
                value = tuple(int(p) for p in parts)
            except ValueError:
                raise LatticeError(f"cannot parse dims {value!r}") from None
        value = tuple(value)
        if len(value) not in (2, 3):
            raise LatticeError(f"dims need 2 or 3 extents, got {len(value)}")
        return cls(*value)

    @property
    def extents(self) -> Tuple[int, ...]:
        """Extents in coordinate order ``(Lx, Ly[, Lz])``."""
        if self.Lz is None:
            return (self.Lx, self.Ly)
        return (self.Lx, self.Ly, self.Lz)

    @property
    def shape(self) -> Tuple[int, ...]:
        """Array shape of the occupancy matrix (reversed extents)."""
        return self.extents[::-1]

    @property
    def size(self) -> int:
        return int(np.prod(self.extents))

    def __str__(self) -> str:
        return "x".join(str(e) for e in self.extents)


def validate_dims(kind: TessellationKind, dims: Dims, bc: BoundaryKind) -> None:
    if kind is TessellationKind.CUBE and dims.Lz is None:
        raise LatticeError("cube lattices need Lz")
    if kind is not TessellationKind.CUBE and dims.Lz is not None:
        raise LatticeError(f"{kind.value} lattices are two-dimensional; got Lz={dims.Lz}")
    if bc is BoundaryKind.PERIODIC and kind in (TessellationKind.TRIANGLE, TessellationKind.HEXAGON):
        # odd Lx breaks the alternation across the x wrap; odd Ly is rejected too
        if dims.Lx % 2:
            raise LatticeError(f"periodic {kind.value} lattices need even Lx, got Lx={dims.Lx}")
        if dims.Ly % 2:
            raise LatticeError(f"periodic {kind.value} lattices need even Ly, got Ly={dims.Ly}")


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Occupancy state of a regular lattice.

    Treat instances as immutable: ``occupy`` returns a new grid and the
    underlying array is flagged read-only.
    """

    kind: TessellationKind
    dims: Dims
    bc: BoundaryKind
    occupancy: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=bool)
        if occ.shape != self.dims.shape:
            raise LatticeError(f"occupancy shape {occ.shape} does not match dims {self.dims}")
        if occ.flags.writeable:
            occ = occ.copy()
            occ.flags.writeable = False
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n_agents(self) -> int:
        return int(self.occupancy.sum())

    @property
    def n_sites(self) -> int:
        return self.dims.size

    def with_meta(self, **meta) -> "OccupancyGrid":
        return OccupancyGrid(self.kind, self.dims, self.bc, self.occupancy, {**self.meta, **meta})

    def with_bc(self, bc) -> "OccupancyGrid":
        bc = parse_enum(BoundaryKind, bc)
        validate_dims(self.kind, self.dims, bc)
        return OccupancyGrid(self.kind, self.dims, bc, self.occupancy, self.meta)

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return (
            self.kind is other.kind
            and self.dims == other.dims
            and self.bc is other.bc
            and np.array_equal(self.occupancy, other.occupancy)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"OccupancyGrid({self.kind.value}, {self.dims}, {self.bc.value}, "
            f"N={self.n_agents})"
        )


def make_grid(kind, dims, bc, occupancy=None, meta=None) -> OccupancyGrid:
    """Return an all-vacant grid (or one with the given occupancy array)."""
    kind = parse_enum(TessellationKind, kind)
    bc = parse_enum(BoundaryKind, bc)
    dims = Dims.of(dims)
    validate_dims(kind, dims, bc)
    if occupancy is None:
        occupancy = np.zeros(dims.shape, dtype=bool)
    else:
        occupancy = np.asarray(occupancy)
        if occupancy.dtype != bool:
            if not np.isin(occupancy, (0, 1)).all():
                raise LatticeError("occupancy must be binary")
            occupancy = occupancy.astype(bool)
    return OccupancyGrid(kind, dims, bc, occupancy, meta or {})


def check_coord(dims: Dims, coord: Sequence[int]) -> Coord:
    coord = tuple(int(c) for c in coord)
    if len(coord) != len(dims.extents):
        raise LatticeError(f"coordinate {coord} has wrong length for dims {dims}")
    for c, L in zip(coord, dims.extents):
        if not 1 <= c <= L:
            raise LatticeError(f"coordinate {coord} out of range for dims {dims}")
    return coord


def coord_to_index(coord: Coord) -> Tuple[int, ...]:
    """1-based ``(x, y[, z])`` to a 0-based array index ``[.., y, x]``."""
    return tuple(c - 1 for c in reversed(coord))


def occupy(grid: OccupancyGrid, coords: Iterable[Sequence[int]]) -> OccupancyGrid:
    """Return a copy of ``grid`` with the listed sites occupied."""
    occ = np.array(grid.occupancy, dtype=bool)
    for coord in coords:
        occ[coord_to_index(check_coord(grid.dims, coord))] = True
    return OccupancyGrid(grid.kind, grid.dims, grid.bc, occ, grid.meta)


def agents(grid: OccupancyGrid) -> list:
    """Occupied coordinates in canonical order."""
    idx = np.argwhere(grid.occupancy)
    return [tuple(int(v) + 1 for v in row[::-1]) for row in idx]


def agent_array(grid: OccupancyGrid) -> np.ndarray:
    """Occupied coordinates as an ``(N, ndim)`` integer array in canonical order."""
    idx = np.argwhere(grid.occupancy)
    return idx[:, ::-1].astype(np.int64) + 1


def all_sites(dims: Dims) -> np.ndarray:
    """Every coordinate of ``dims`` as an ``(Z, ndim)`` array in canonical order."""
    grids = np.indices(dims.shape).reshape(len(dims.shape), -1).T
    return grids[:, ::-1].astype(np.int64) + 1


def density(grid: OccupancyGrid) -> Fraction:
    return Fraction(grid.n_agents, grid.n_sites)


@dataclass(frozen=True)
class DistanceDomain:
    m_min: int
    m_max: int

    def __iter__(self):
        return iter(range(self.m_min, self.m_max + 1))

    def __len__(self):
        return self.m_max - self.m_min + 1

    def __contains__(self, m) -> bool:
        return self.m_min <= m <= self.m_max


def distance_domain(kind, metric, bc, dims) -> DistanceDomain:
    """Distances over which the closed-form normalisation is valid.

    Square and cube lattices use the half-extent cap for periodic and the
    ``min - 1`` cap for non-periodic boundaries. Triangle and hexagon caps
    are the ranges confirmed exhaustively by :mod:`latpcf.oracle`; see
    ``latpcf/data/validity.csv``.
    """
    kind = parse_enum(TessellationKind, kind)
    metric = parse_enum(MetricKind, metric)
    bc = parse_enum(BoundaryKind, bc)
    dims = Dims.of(dims)
    validate_dims(kind, dims, bc)
    periodic = bc is BoundaryKind.PERIODIC
    Lx, Ly = dims.Lx, dims.Ly

    if kind in (TessellationKind.SQUARE, TessellationKind.CUBE):
        if metric not in (MetricKind.TAXICAB, MetricKind.UNIFORM):
            raise LatticeError(f"no closed-form distance domain for {metric.value} on {kind.value}")
        if periodic:
            m_max = min(L // 2 for L in dims.extents)
        else:
            m_max = min(dims.extents) - 1
    elif metric is not MetricKind.TAXICAB:
        raise LatticeError(f"{kind.value} lattices support only the taxicab (step) metric")
    elif kind is TessellationKind.TRIANGLE:
        if periodic:
            m_max = min(Lx // 2 - 1, Ly - 1)
        elif Lx % 2 == 1 and Ly % 2 == 0:
            raise LatticeError(
                f"non-periodic triangle lattice {dims}: the closed form needs even Lx or odd Ly"
            )
        else:
            m_max = min(Lx, 2 * Ly)
    else:
        if periodic:
            m_max = min(Lx, Ly) // 2 - 1
        else:
            m_max = min(Lx, Ly)

    if m_max < 1:
        raise LatticeError(
            f"empty distance domain for {kind.value}/{metric.value}/{bc.value} on {dims}"
        )
    return DistanceDomain(1, m_max)
