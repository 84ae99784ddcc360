"""PCF profiles: observed pair counts over expected pair counts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .lattice import (
    BoundaryKind,
    LatticeError,
    MetricKind,
    OccupancyGrid,
    TessellationKind,
    distance_domain,
    parse_enum,
)
from .metrics import annular_bin_counts, check_metric, count_agent_pairs, rectilinear_counts
from .norms import (
    expected_annular,
    expected_pairs,
    expected_rectilinear,
    site_pairs_analytic,
)

Number = Union[Fraction, float, int]

# metadata keys that must agree before profiles can be averaged
_MATCH_KEYS = ("kind", "metric", "bc", "dims", "delta")


class PcfError(LatticeError):
    """A PCF cannot be formed (too few agents, mismatched profiles, ...)."""


@dataclass(frozen=True)
class PcfProfile:
    """Per-distance counts, expectations and ratios.

    ``f`` entries are exact :class:`~fractions.Fraction` values whenever the
    expectation is exact; annular profiles carry floats.
    """

    m: Tuple[int, ...]
    count: Tuple[Number, ...]
    expected: Tuple[Number, ...]
    f: Tuple[Number, ...]
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.m)
        if not (len(self.count) == len(self.expected) == len(self.f) == n):
            raise PcfError("profile columns differ in length")
        object.__setattr__(self, "meta", dict(self.meta))

    def __len__(self) -> int:
        return len(self.m)

    def as_dict(self) -> Dict[int, Number]:
        return dict(zip(self.m, self.f))

    def floats(self) -> List[float]:
        return [float(v) for v in self.f]

    def at(self, m: int) -> Number:
        try:
            return self.f[self.m.index(m)]
        except ValueError:
            raise KeyError(m) from None


def _ratio(count: int, expected) -> Number:
    if expected == 0:
        raise PcfError("PCF undefined: zero expected pairs")
    if isinstance(expected, Fraction):
        return Fraction(count) / expected
    return count / expected


def _need_pairs(grid: OccupancyGrid) -> int:
    N = grid.n_agents
    if N < 2:
        raise PcfError(f"PCF undefined: zero expected pairs (N={N})")
    return N


def _grid_meta(grid: OccupancyGrid, metric: str, **extra) -> dict:
    meta = dict(grid.meta)
    meta.update(
        kind=grid.kind.value,
        metric=metric,
        bc=grid.bc.value,
        dims=str(grid.dims),
        N=grid.n_agents,
    )
    meta.update(extra)
    return meta


def build_profile(counts: Mapping[int, int], expected: Mapping[int, Number],
                  meta: Optional[Mapping[str, object]] = None) -> PcfProfile:
    """Assemble a profile over the keys of ``expected`` (in increasing order)."""
    ms = tuple(sorted(expected))
    c = tuple(int(counts.get(m, 0)) for m in ms)
    e = tuple(expected[m] for m in ms)
    f = tuple(_ratio(ci, ei) for ci, ei in zip(c, e))
    return PcfProfile(ms, c, e, f, meta or {})


def pcf_profile(grid: OccupancyGrid, metric="taxicab", method: str = "local") -> PcfProfile:
    """Taxicab or uniform PCF over the full distance domain of ``grid``."""
    metric = parse_enum(MetricKind, metric)
    if metric not in (MetricKind.TAXICAB, MetricKind.UNIFORM):
        raise PcfError(f"pcf_profile handles taxicab and uniform metrics, not {metric.value}")
    check_metric(grid.kind, metric)
    N = _need_pairs(grid)
    domain = distance_domain(grid.kind, metric, grid.bc, grid.dims)
    counts = count_agent_pairs(grid, metric, method=method, m_max=domain.m_max)
    Z = grid.n_sites
    expected = {
        m: expected_pairs(N, Z, site_pairs_analytic(grid.kind, metric, grid.bc, grid.dims, m))
        for m in domain
    }
    return build_profile(counts, expected, _grid_meta(grid, metric.value))


def rectilinear_profile(grid: OccupancyGrid) -> Tuple[PcfProfile, PcfProfile, PcfProfile]:
    """Column-offset, row-offset and averaged rectilinear PCFs.

    The averaged profile covers ``1..min(Lx, Ly) - 1``; its ``count`` and
    ``expected`` columns hold the sums of the two components.
    """
    if grid.kind is not TessellationKind.SQUARE or grid.bc is not BoundaryKind.NONPERIODIC:
        raise PcfError("the rectilinear PCF needs a non-periodic square grid")
    N = _need_pairs(grid)
    cx, cy = rectilinear_counts(grid)
    dims = grid.dims
    ex = {m: expected_rectilinear(m, "x", N, dims) for m in range(1, dims.Lx)}
    ey = {m: expected_rectilinear(m, "y", N, dims) for m in range(1, dims.Ly)}
    px = build_profile(cx, ex, _grid_meta(grid, MetricKind.RECTILINEAR_X.value))
    py = build_profile(cy, ey, _grid_meta(grid, MetricKind.RECTILINEAR_Y.value))
    top = min(dims.Lx, dims.Ly) - 1
    ms = tuple(range(1, top + 1))
    fx, fy = px.as_dict(), py.as_dict()
    both = PcfProfile(
        ms,
        tuple(cx[m] + cy[m] for m in ms),
        tuple(ex[m] + ey[m] for m in ms),
        tuple((fx[m] + fy[m]) / 2 for m in ms),
        _grid_meta(grid, "rectilinear"),
    )
    return px, py, both


def annular_bin_limit(grid: OccupancyGrid, delta) -> int:
    """Number of annular bins reported: radii up to half the smaller extent."""
    return max(1, int(math.floor(Fraction(min(grid.dims.extents), 2) / Fraction(delta))))


def annular_profile(grid: OccupancyGrid, delta=1, k_max: Optional[int] = None) -> PcfProfile:
    """Euclidean-bin PCF with the annulus-area expectation.

    The expectation only approximates the number of site pairs per bin, so
    this profile is miscalibrated on lattices; the metadata says so.
    """
    if grid.kind is not TessellationKind.SQUARE:
        raise PcfError("the annular PCF is defined on square grids only")
    N = _need_pairs(grid)
    delta = Fraction(delta)
    if delta <= 0:
        raise PcfError("annular bandwidth must be positive")
    if k_max is None:
        k_max = annular_bin_limit(grid, delta)
    method = "local" if grid.bc is BoundaryKind.PERIODIC or grid.n_agents > 2000 else "pairs"
    counts = annular_bin_counts(grid, delta, k_max=k_max, method=method)
    expected = {k: expected_annular(k, delta, N, grid.dims) for k in range(1, k_max + 1)}
    meta = _grid_meta(grid, MetricKind.ANNULAR.value, delta=str(delta), normalization="approximate")
    return build_profile(counts, expected, meta)


def average_profiles(profiles: Sequence[PcfProfile]) -> PcfProfile:
    """Pointwise mean of ``f``; counts and expectations are summed."""
    profiles = list(profiles)
    if not profiles:
        raise PcfError("nothing to average")
    first = profiles[0]
    for p in profiles[1:]:
        if p.m != first.m:
            raise PcfError("profiles cover different distance ranges")
        for key in _MATCH_KEYS:
            if p.meta.get(key) != first.meta.get(key):
                raise PcfError(
                    f"profile metadata differ on {key!r}: "
                    f"{first.meta.get(key)!r} vs {p.meta.get(key)!r}"
                )
    n = len(profiles)
    cols = list(zip(*(p.f for p in profiles)))
    f = tuple(sum(col[1:], col[0]) / n for col in cols)
    count = tuple(sum(col) for col in zip(*(p.count for p in profiles)))
    expected = tuple(sum(col[1:], col[0]) for col in zip(*(p.expected for p in profiles)))
    meta = {k: first.meta[k] for k in _MATCH_KEYS if k in first.meta}
    meta["replicates"] = n
    seeds = [p.meta.get("seed") for p in profiles if p.meta.get("seed") is not None]
    if seeds:
        meta["seeds"] = " ".join(str(s) for s in seeds)
    return PcfProfile(first.m, count, expected, f, meta)


def first_minimum(profile: PcfProfile, scope: str = "trough") -> int:
    """Distance at which the PCF first bottoms out.

    ``scope="trough"`` (default) returns the first local minimum: the
    smallest ``m`` where ``f`` stops decreasing, with plateaus resolved to
    their first point. This is the aggregate-diameter reading; on patterns
    with several clusters the later between-cluster troughs can be just as
    deep, so the global minimum is not tied to cluster size.

    ``scope="global"`` returns the smallest ``m`` attaining the global
    minimum of ``f``.
    """
    if not len(profile):
        raise PcfError("empty profile")
    f = profile.f
    if scope == "global":
        best = min(f)
        return profile.m[f.index(best)]
    if scope != "trough":
        raise PcfError(f"unknown scope {scope!r}; expected 'trough' or 'global'")
    i = 0
    while i + 1 < len(f) and f[i + 1] < f[i]:
        i += 1
    return profile.m[i]
