"""Brute-force enumeration used to check the closed-form site-pair counts.

Nothing here imports :mod:`latpcf.norms`; the closed forms under test are
passed in by the caller (or looked up lazily by :func:`verify_normalization`).
"""
from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .lattice import (
    BoundaryKind,
    Dims,
    LatticeError,
    MetricKind,
    TessellationKind,
    all_sites,
    distance_domain,
    parse_enum,
    validate_dims,
)
from .metrics import check_metric, pairwise_distances

SITE_CAP = 20_736

SUPPORTED = (
    (TessellationKind.SQUARE, MetricKind.TAXICAB),
    (TessellationKind.SQUARE, MetricKind.UNIFORM),
    (TessellationKind.TRIANGLE, MetricKind.TAXICAB),
    (TessellationKind.HEXAGON, MetricKind.TAXICAB),
    (TessellationKind.CUBE, MetricKind.TAXICAB),
    (TessellationKind.CUBE, MetricKind.UNIFORM),
)

# human-readable distance-domain rules, mirrored by lattice.distance_domain
DOMAIN_RULES = {
    ("square", "periodic"): "1 <= m <= min(Lx//2, Ly//2)",
    ("square", "nonperiodic"): "1 <= m <= min(Lx, Ly) - 1",
    ("cube", "periodic"): "1 <= m <= min(Lx//2, Ly//2, Lz//2)",
    ("cube", "nonperiodic"): "1 <= m <= min(Lx, Ly, Lz) - 1",
    ("triangle", "periodic"): "Lx, Ly even; 1 <= m <= min(Lx//2 - 1, Ly - 1)",
    ("triangle", "nonperiodic"): "Lx even or Ly odd; 1 <= m <= min(Lx, 2*Ly)",
    ("hexagon", "periodic"): "Lx, Ly even; 1 <= m <= min(Lx, Ly)//2 - 1",
    ("hexagon", "nonperiodic"): "1 <= m <= min(Lx, Ly)",
}


class OracleError(LatticeError):
    """Enumeration request outside the oracle's limits."""


def brute_site_pairs(kind, metric, bc, dims, cap: int = SITE_CAP) -> Dict[int, int]:
    """Unordered site pairs per distance, by enumerating every pair of sites."""
    kind = parse_enum(TessellationKind, kind)
    metric = parse_enum(MetricKind, metric)
    bc = parse_enum(BoundaryKind, bc)
    dims = Dims.of(dims)
    validate_dims(kind, dims, bc)
    check_metric(kind, metric)
    Z = dims.size
    if Z > cap:
        raise OracleError(f"{Z} sites exceeds the enumeration cap of {cap}")
    sites = all_sites(dims)
    hist = Counter()
    block = max(1, (1 << 22) // Z)
    for start in range(0, Z, block):
        rows = sites[start:start + block]
        d = pairwise_distances(kind, metric, bc, dims, rows, sites)
        i = np.arange(start, start + len(rows))[:, None]
        j = np.arange(Z)[None, :]
        vals, counts = np.unique(d[j > i], return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            hist[v] += c
    return {m: c for m, c in sorted(hist.items()) if m > 0}


def matrix_power_distances(Z: int, edges: Iterable[Tuple[int, int]]) -> np.ndarray:
    """Step distances straight from the walk-count definition.

    ``D[i, j]`` is the least ``m`` with ``(A^m)[i, j] != 0``, where ``A`` is
    the 0/1 adjacency matrix and ``A^0`` the identity; -1 if no power up to
    ``Z - 1`` reaches. Walk counts stay exact: int64 while ``(Z-1)^(Z-1)``
    fits, Python integers beyond that. No graph search is involved.
    """
    exact = Z <= 16
    A = np.zeros((Z, Z), dtype=np.int64 if exact else object)
    for i, j in edges:
        if i != j:
            A[i, j] = A[j, i] = 1
    D = np.full((Z, Z), -1, dtype=np.int64)
    power = np.eye(Z, dtype=np.int64).astype(A.dtype)
    for m in range(Z):
        D[(D < 0) & (power != 0)] = m
        power = power.dot(A)
    return D


@dataclass(frozen=True)
class ValidationRow:
    kind: str
    metric: str
    bc: str
    dims: str
    m: int
    analytic: Optional[int]
    brute: int

    @property
    def match(self) -> bool:
        return self.analytic == self.brute


@dataclass
class ValidationReport:
    rows: List[ValidationRow] = field(default_factory=list)
    # (kind, metric, bc, dims) combinations outside the closed forms' reach
    excluded: List[Tuple[str, str, str, str]] = field(default_factory=list)

    @property
    def mismatches(self) -> List[ValidationRow]:
        return [r for r in self.rows if not r.match]

    @property
    def ok(self) -> bool:
        return bool(self.rows) and not self.mismatches

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "metric", "bc", "dims", "m", "analytic", "brute", "match"])
        for r in self.rows:
            w.writerow([r.kind, r.metric, r.bc, r.dims, r.m, r.analytic, r.brute, int(r.match)])
        return buf.getvalue()

    def summary(self) -> str:
        groups = Counter((r.kind, r.metric, r.bc) for r in self.rows)
        bad = Counter((r.kind, r.metric, r.bc) for r in self.mismatches)
        lines = [
            f"{k}/{m}/{b}: {n} checks, {bad[(k, m, b)]} mismatches"
            for (k, m, b), n in sorted(groups.items())
        ]
        lines.append(f"total: {len(self.rows)} checks, {len(self.mismatches)} mismatches")
        return "\n".join(lines)


def sweep_dims(kind: TessellationKind, extents: Sequence[int], cube_extents: Sequence[int]):
    if kind is TessellationKind.CUBE:
        return [Dims(*e) for e in itertools.product(cube_extents, repeat=3)]
    return [Dims(*e) for e in itertools.product(extents, repeat=2)]


def verify_normalization(extents: Sequence[int] = range(4, 13),
                         cube_extents: Sequence[int] = range(4, 9),
                         combos: Optional[Sequence[Tuple[object, object]]] = None,
                         bcs: Sequence[object] = ("periodic", "nonperiodic"),
                         analytic: Optional[Callable[..., int]] = None) -> ValidationReport:
    """Compare closed-form counts with enumeration over a sweep of grid sizes.

    ``analytic(kind, metric, bc, dims, m)`` defaults to
    :func:`latpcf.norms.site_pairs_analytic`; a failing call is recorded as
    a mismatch with ``analytic=None``.
    """
    if analytic is None:
        from .norms import site_pairs_analytic as analytic
    combos = SUPPORTED if combos is None else [
        (parse_enum(TessellationKind, k), parse_enum(MetricKind, m)) for k, m in combos
    ]
    report = ValidationReport()
    for kind, metric in combos:
        for bc in (parse_enum(BoundaryKind, b) for b in bcs):
            for dims in sweep_dims(kind, extents, cube_extents):
                key = (kind.value, metric.value, bc.value, str(dims))
                try:
                    domain = distance_domain(kind, metric, bc, dims)
                except LatticeError:
                    report.excluded.append(key)
                    continue
                brute = brute_site_pairs(kind, metric, bc, dims)
                for m in domain:
                    try:
                        value = analytic(kind, metric, bc, dims, m)
                    except (LatticeError, ArithmeticError):
                        value = None
                    report.rows.append(ValidationRow(*key, m, value, brute.get(m, 0)))
    return report


def validity_table(report: ValidationReport) -> str:
    """CSV of the distance-domain rule per combination, with its sweep evidence."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "metric", "bc", "constraint", "checks", "mismatches"])
    checks = Counter((r.kind, r.metric, r.bc) for r in report.rows)
    bad = Counter((r.kind, r.metric, r.bc) for r in report.mismatches)
    for key in sorted(checks):
        kind, metric, bc = key
        w.writerow([kind, metric, bc, DOMAIN_RULES[(kind, bc)], checks[key], bad[key]])
    return buf.getvalue()
