"""Closed-form site-pair counts and expected agent-pair counts.

Every count is an unordered number of site pairs ``s(m)``. Formulas are
evaluated with :class:`fractions.Fraction` and checked to be integral
before they are returned.

Periodic square and cube counts include an exact correction at
``m == L/2`` on even extents: there the two displacements ``+L/2`` and
``-L/2`` along an axis reach the same site, so the ring around a site
holds fewer distinct sites than the unbounded-lattice ring size.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .lattice import (
    BoundaryKind,
    Dims,
    LatticeError,
    MetricKind,
    TessellationKind,
    distance_domain,
    parse_enum,
)

SQUARE, TRIANGLE, HEXAGON, CUBE = (
    TessellationKind.SQUARE,
    TessellationKind.TRIANGLE,
    TessellationKind.HEXAGON,
    TessellationKind.CUBE,
)
TAXICAB, UNIFORM = MetricKind.TAXICAB, MetricKind.UNIFORM


def _integral(value: Fraction, label: str) -> int:
    value = Fraction(value)
    if value.denominator != 1:
        raise ArithmeticError(f"{label} evaluated to non-integer {value}")
    return int(value)


def ring_size(kind, metric, m: int) -> int:
    """Sites at distance ``m`` from a site of the unbounded lattice."""
    kind = parse_enum(TessellationKind, kind)
    metric = parse_enum(MetricKind, metric)
    table = {
        (SQUARE, TAXICAB): 4 * m,
        (SQUARE, UNIFORM): 8 * m,
        (TRIANGLE, TAXICAB): 3 * m,
        (HEXAGON, TAXICAB): 6 * m,
        (CUBE, TAXICAB): 2 * (2 * m * m + 1),
        (CUBE, UNIFORM): 2 * (12 * m * m + 1),
    }
    try:
        return table[(kind, metric)]
    except KeyError:
        raise LatticeError(f"no ring size for {metric.value} on {kind.value}") from None


def _periodic_ring(kind, metric, m: int, extents) -> int:
    """Distinct sites at wrapped distance ``m`` on a torus with ``m <= L/2``."""
    ties = sum(1 for L in extents if L == 2 * m)
    if metric is TAXICAB:
        return ring_size(kind, metric, m) - ties
    box = 1
    for L in extents:
        box *= min(2 * m + 1, L)
    return box - (2 * m - 1) ** len(extents)


def _square_nonperiodic(metric, m, Lx, Ly) -> Fraction:
    if metric is TAXICAB:
        return 2 * m * Lx * Ly - (Lx + Ly) * m * m + Fraction(m ** 3 - m, 3)
    return Fraction(4 * m * Lx * Ly - 3 * (Lx + Ly) * m * m + 2 * m ** 3)


def _cube_nonperiodic(metric, m, Lx, Ly, Lz) -> Fraction:
    volume = Lx * Ly * Lz
    faces = Lx * Ly + Ly * Lz + Lz * Lx
    edges = Lx + Ly + Lz
    if metric is TAXICAB:
        return (
            (2 * m * m + 1) * volume
            - Fraction(2 * m ** 3 + m, 3) * faces
            + Fraction(m * m * (m * m - 1), 6) * edges
            - Fraction(m ** 5 - 5 * m ** 3 + 4 * m, 30)
        )
    return Fraction(
        (12 * m * m + 1) * volume
        - m * (8 * m * m + 1) * faces
        + m * m * (5 * m * m + 1) * edges
        - m ** 3 * (3 * m * m + 1)
    )


def _triangle_nonperiodic(m, Lx, Ly) -> Fraction:
    if m == 1:
        return Fraction(3 * Lx * Ly - Lx - 2 * Ly, 2)
    if m == 2:
        return Fraction(3 * Lx * Ly - 2 * Lx - 4 * Ly + 2)
    k3, k6, k7 = ((m - j) // 4 for j in (3, 6, 7))
    return (
        Fraction(3 * m * Lx * Ly - Lx * m * m, 2)
        + Ly * (2 * k6 * (k6 - 2 * k3 + 1) + k3 * (m - 6) - m * m + m - 2)
        + Fraction((m - 1) * (m * m - 2 * m + 6), 3)
        - Fraction((k7 + 1) * (20 * k7 * k7 + 37 * k7 + 12), 3)
        - (m - 7 - 4 * k7) * (k7 + 1) * (m + k7 - 2)
    )


def _hexagon_nonperiodic(m, Lx, Ly) -> Fraction:
    k = m % 2
    return (
        3 * m * Lx * Ly
        - Fraction((7 * m * m + k) * Lx, 4)
        - 2 * m * m * Ly
        + Fraction(11 * m ** 3 - (2 - 3 * k) * m, 12)
    )


def site_pairs_formula(kind, metric, bc, dims, m: int) -> int:
    """Evaluate the closed form without checking the distance domain."""
    kind = parse_enum(TessellationKind, kind)
    metric = parse_enum(MetricKind, metric)
    bc = parse_enum(BoundaryKind, bc)
    dims = Dims.of(dims)
    ext = dims.extents
    Z = dims.size
    label = f"s({m}) for {kind.value}/{metric.value}/{bc.value} {dims}"
    if bc is BoundaryKind.PERIODIC:
        if kind in (SQUARE, CUBE):
            ring = _periodic_ring(kind, metric, m, ext)
        else:
            ring = ring_size(kind, metric, m)
        return _integral(Fraction(ring * Z, 2), label)
    if kind is SQUARE:
        value = _square_nonperiodic(metric, m, *ext)
    elif kind is CUBE:
        value = _cube_nonperiodic(metric, m, *ext)
    elif kind is TRIANGLE:
        value = _triangle_nonperiodic(m, *ext)
    elif kind is HEXAGON:
        value = _hexagon_nonperiodic(m, *ext)
    else:  # pragma: no cover
        raise LatticeError(f"unknown tessellation {kind}")
    return _integral(value, label)


def site_pairs_analytic(kind, metric, bc, dims, m: int) -> int:
    """Number of unordered site pairs at distance ``m`` (closed form).

    ``m`` must lie in :func:`latpcf.lattice.distance_domain`.
    """
    kind = parse_enum(TessellationKind, kind)
    metric = parse_enum(MetricKind, metric)
    if (kind, metric) not in {
        (SQUARE, TAXICAB), (SQUARE, UNIFORM), (CUBE, TAXICAB), (CUBE, UNIFORM),
        (TRIANGLE, TAXICAB), (HEXAGON, TAXICAB),
    }:
        raise LatticeError(f"no closed form for {metric.value} on {kind.value}")
    domain = distance_domain(kind, metric, bc, dims)
    if m not in domain:
        raise LatticeError(f"m={m} outside the distance domain 1..{domain.m_max}")
    return site_pairs_formula(kind, metric, bc, dims, m)


def occupancy_probability(N: int, Z: int) -> Fraction:
    """Probability that two given distinct sites are both occupied."""
    if Z < 2:
        raise LatticeError("need at least two sites")
    if not 0 <= N <= Z:
        raise LatticeError(f"agent count {N} outside 0..{Z}")
    return Fraction(N * (N - 1), Z * (Z - 1))


def expected_pairs(N: int, Z: int, s: int) -> Fraction:
    """Expected agent pairs among ``s`` site pairs under uniform placement."""
    return occupancy_probability(N, Z) * s


def expected_rectilinear(m: int, axis: str, N: int, dims) -> Fraction:
    """Expected agent pairs separated by ``m`` columns (axis ``x``) or rows (``y``).

    The site-pair factor ``Ly^2 (Lx - m)`` already counts unordered pairs.
    """
    dims = Dims.of(dims)
    axis = axis.lower()
    if axis not in ("x", "y"):
        raise LatticeError(f"axis must be 'x' or 'y', got {axis!r}")
    along, across = (dims.Lx, dims.Ly) if axis == "x" else (dims.Ly, dims.Lx)
    if not 1 <= m <= along - 1:
        raise LatticeError(f"m={m} outside 1..{along - 1}")
    return occupancy_probability(N, dims.size) * (across * across * (along - m))


def expected_annular(m_bin: int, delta, N: int, dims) -> float:
    """Annulus-area approximation for bin ``(m - delta, m]`` with ``m = m_bin * delta``.

    Deliberately approximate: on a lattice it does not track the true
    number of site pairs per bin.
    """
    dims = Dims.of(dims)
    delta = float(Fraction(delta))
    if delta <= 0:
        raise LatticeError("annular bandwidth must be positive")
    if m_bin < 1:
        raise LatticeError("annular bins start at 1")
    if not 0 <= N <= dims.size:
        raise LatticeError(f"agent count {N} outside 0..{dims.size}")
    m = m_bin * delta
    return N * (N - 1) * 2.0 * math.pi * m * delta / dims.size / 2.0
