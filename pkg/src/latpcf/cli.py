"""Command-line interface.

Exit codes: 0 success, 1 invalid input or failed validation, 2 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import io as pio
from .graph import graph_pcf
from .lattice import Dims, LatticeError
from .oracle import validity_table, verify_normalization
from .patterns import (
    gen_aggregated,
    gen_deterministic_pattern,
    gen_proliferation,
    gen_segregated,
    gen_uniform_random,
    gen_voronoi_lattice,
)
from .pcf import annular_profile, average_profiles, pcf_profile, rectilinear_profile

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

STOCHASTIC = {"uniform", "proliferation", "voronoi", "aggregated", "segregated"}
GRAPH_PATTERNS = {"voronoi", "aggregated", "segregated"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="latpcf", description="Pair correlation functions on lattices and graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="occupancy file -> PCF profile")
    c.add_argument("--input", required=True)
    c.add_argument("--tessellation", choices=["square", "triangle", "hexagon", "cube"])
    c.add_argument("--metric", default="taxicab",
                   choices=["taxicab", "uniform", "annular", "rectilinear",
                            "rectilinear-x", "rectilinear-y"])
    c.add_argument("--bc", choices=["periodic", "nonperiodic", "non-periodic"])
    c.add_argument("--delta", default="1", help="annular bandwidth")
    c.add_argument("--out", required=True)
    c.add_argument("--plot", action="store_true", help="write two-column m,f data")

    g = sub.add_parser("generate", help="pattern -> occupancy (or graph) file")
    g.add_argument("--pattern", required=True,
                   choices=["uniform", "chessboard", "stripes", "circles", "proliferation",
                            "voronoi", "aggregated", "segregated"])
    g.add_argument("--tessellation", default="square",
                   choices=["square", "triangle", "hexagon", "cube"])
    g.add_argument("--dims", default=None, help="e.g. 100x100 or 8x8x8")
    g.add_argument("--bc", default=None, choices=["periodic", "nonperiodic", "non-periodic"])
    g.add_argument("--density", default="0.5")
    g.add_argument("--width", type=int, default=1)
    g.add_argument("--spacing", default="1")
    g.add_argument("--steps", type=int, default=10)
    g.add_argument("--jitter", type=float, default=1.0)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True, help="occupancy file, or edge list for graph patterns")
    g.add_argument("--occupied-out", help="occupied-vertex list for graph patterns")

    gr = sub.add_parser("graph", help="edge list + occupied list -> general PCF profile")
    gr.add_argument("--edges", required=True)
    gr.add_argument("--occupied", required=True)
    gr.add_argument("--m-max", type=int)
    gr.add_argument("--out", required=True)
    gr.add_argument("--plot", action="store_true")

    a = sub.add_parser("average", help="profile files -> averaged profile")
    a.add_argument("profiles", nargs="+")
    a.add_argument("--out", required=True)
    a.add_argument("--plot", action="store_true")

    v = sub.add_parser("validate", help="compare closed forms with enumeration")
    v.add_argument("--min-extent", type=int, default=4)
    v.add_argument("--max-extent", type=int, default=12)
    v.add_argument("--max-cube-extent", type=int, default=None,
                   help="defaults to min(max-extent, 8)")
    v.add_argument("--out", help="per-check CSV report")
    v.add_argument("--validity-out", help="distance-domain validity table CSV")

    i = sub.add_parser("ingest", help="PGM/PPM image -> occupancy file")
    i.add_argument("--image", required=True)
    i.add_argument("--threshold", type=int, default=pio.DEFAULT_THRESHOLD)
    i.add_argument("--out", required=True)
    return p


def _compute(args) -> int:
    grid = pio.read_occupancy(args.input, kind=args.tessellation, bc=args.bc)
    metric = args.metric
    if metric.startswith("rectilinear"):
        if grid.bc.value == "periodic":
            # the rectilinear PCF only exists without wrap
            grid = grid.with_bc("nonperiodic")
        px, py, both = rectilinear_profile(grid)
        profile = {"rectilinear": both, "rectilinear-x": px, "rectilinear-y": py}[metric]
    elif metric == "annular":
        profile = annular_profile(grid, args.delta)
    else:
        profile = pcf_profile(grid, metric)
    pio.write_profile(profile, args.out, plot=args.plot)
    return EXIT_OK


def _default_dims(pattern: str, tessellation: str) -> str:
    if pattern == "proliferation":
        return "100x100"
    if pattern in GRAPH_PATTERNS:
        return "30x30"
    return "8x8x8" if tessellation == "cube" else "100x100"


def _generate(args) -> int:
    pattern = args.pattern
    if pattern in STOCHASTIC and args.seed is None:
        raise UsageError(f"--pattern {pattern} is random and needs an explicit --seed")
    dims = Dims.of(args.dims or _default_dims(pattern, args.tessellation))
    if pattern in GRAPH_PATTERNS:
        lattice = gen_voronoi_lattice(dims, args.jitter, args.seed)
        if pattern == "aggregated":
            lattice = gen_aggregated(lattice, args.density, args.seed)
        elif pattern == "segregated":
            lattice = gen_segregated(lattice, args.density, args.seed)
        pio.write_graph(lattice, args.out, args.occupied_out)
        return EXIT_OK
    if pattern == "uniform":
        grid = gen_uniform_random(args.tessellation, dims, args.bc or "periodic",
                                  args.density, args.seed)
    elif pattern == "proliferation":
        if args.dims is not None and dims != Dims(100, 100):
            raise UsageError("the proliferation model runs on a 100x100 lattice")
        grid = gen_proliferation(args.steps, args.seed)
    else:
        if args.tessellation != "square":
            raise UsageError(f"--pattern {pattern} is defined on square lattices only")
        grid = gen_deterministic_pattern(pattern, dims, args.bc or "nonperiodic",
                                         width=args.width, spacing=args.spacing)
    pio.write_occupancy(grid, args.out)
    return EXIT_OK


def _graph(args) -> int:
    lattice = pio.read_graph(args.edges, args.occupied)
    pio.write_profile(graph_pcf(lattice, args.m_max), args.out, plot=args.plot)
    return EXIT_OK


def _average(args) -> int:
    profiles = [pio.read_profile(p) for p in args.profiles]
    pio.write_profile(average_profiles(profiles), args.out, plot=args.plot)
    return EXIT_OK


def _validate(args) -> int:
    lo, hi = args.min_extent, args.max_extent
    if lo < 2 or hi < lo:
        raise UsageError(f"bad extent range {lo}..{hi}")
    cube_hi = args.max_cube_extent if args.max_cube_extent is not None else min(hi, 8)
    report = verify_normalization(range(lo, hi + 1), range(lo, cube_hi + 1))
    if args.out:
        Path(args.out).write_text(report.to_csv())
    if args.validity_out:
        Path(args.validity_out).write_text(validity_table(report))
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_INVALID


def _ingest(args) -> int:
    grid = pio.read_image(args.image, args.threshold)
    pio.write_occupancy(grid, args.out)
    return EXIT_OK


HANDLERS = {
    "compute": _compute,
    "generate": _generate,
    "graph": _graph,
    "average": _average,
    "validate": _validate,
    "ingest": _ingest,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except OSError as exc:
        print(f"latpcf: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, LatticeError, ValueError) as exc:
        print(f"latpcf: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
