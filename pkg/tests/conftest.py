"""Independent reference implementations used across the test suite.

These deliberately avoid ``latpcf.metrics``: distances are recomputed from
coordinates with plain Python, and triangle/hexagon step distances come
from a hand-written breadth-first search.
"""
import itertools
from collections import Counter, deque

import numpy as np
import pytest


def sites_of(extents):
    # canonical order: x fastest, then y, then z
    return [tuple(reversed(c)) for c in itertools.product(*(range(1, L + 1) for L in reversed(extents)))]


def wrapped(d, L, periodic):
    d = abs(d)
    return min(d, L - d) if periodic else d


def ref_distance(metric, extents, periodic, a, b):
    offs = [wrapped(p - q, L, periodic) for p, q, L in zip(a, b, extents)]
    if metric == "taxicab":
        return sum(offs)
    if metric == "uniform":
        return max(offs)
    raise ValueError(metric)


def ref_step_neighbors(kind, extents, periodic, site):
    Lx, Ly = extents
    x, y = site
    if kind == "triangle":
        cand = [(x - 1, y), (x + 1, y), (x, y - 1) if (x + y) % 2 == 0 else (x, y + 1)]
    else:
        shift = 1 if x % 2 == 1 else -1
        cand = [(x, y - 1), (x, y + 1), (x - 1, y), (x + 1, y), (x - 1, y + shift), (x + 1, y + shift)]
    out = set()
    for cx, cy in cand:
        if periodic:
            cx, cy = (cx - 1) % Lx + 1, (cy - 1) % Ly + 1
        elif not (1 <= cx <= Lx and 1 <= cy <= Ly):
            continue
        if (cx, cy) != site:
            out.add((cx, cy))
    return out


def ref_bfs(kind, extents, periodic, source):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in ref_step_neighbors(kind, extents, periodic, v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def ref_pair_histogram(kind, metric, extents, periodic, points):
    """Unordered pair counts by distance over ``points`` (1-based tuples)."""
    hist = Counter()
    pts = list(points)
    if kind in ("triangle", "hexagon"):
        for i, a in enumerate(pts):
            dist = ref_bfs(kind, extents, periodic, a)
            for b in pts[i + 1:]:
                hist[dist[b]] += 1
    else:
        for a, b in itertools.combinations(pts, 2):
            hist[ref_distance(metric, extents, periodic, a, b)] += 1
    return dict(hist)


def occupied_points(grid):
    idx = np.argwhere(grid.occupancy)
    return [tuple(int(v) + 1 for v in row[::-1]) for row in idx]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
