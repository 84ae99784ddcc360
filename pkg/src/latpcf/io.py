"""File formats: occupancy grids, graphs, profiles and netpbm images.

Every text format opens with a ``# format=1`` header line that may carry
further ``key=value`` pairs.
"""
from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

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
from .pcf import PcfProfile

FORMAT_VERSION = "1"
DEFAULT_THRESHOLD = 80

PathLike = Union[str, Path]


class FormatError(LatticeError):
    """Malformed file contents."""


def _header_fields(line: str) -> Dict[str, str]:
    body = line.lstrip("#").strip()
    fields = {}
    for token in body.split():
        if "=" not in token:
            raise FormatError(f"header token {token!r} is not key=value")
        key, value = token.split("=", 1)
        fields[key] = value
    return fields


def _check_version(fields: Dict[str, str], where: str) -> None:
    version = fields.get("format")
    if version is not None and version != FORMAT_VERSION:
        raise FormatError(f"{where}: unsupported format={version}")


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".12g")


# -- occupancy ---------------------------------------------------------------

def parse_occupancy(text: str, kind=None, bc=None, source: str = "<text>") -> OccupancyGrid:
    """Parse a 0/1 CSV occupancy block (layers separated by blank lines)."""
    lines = text.splitlines()
    header: Dict[str, str] = {}
    start = 0
    if lines and lines[0].startswith("#"):
        header = _header_fields(lines[0])
        _check_version(header, f"{source}:1")
        start = 1
    for key, given in (("kind", kind), ("bc", bc)):
        if given is None or key not in header:
            continue
        enum = TessellationKind if key == "kind" else BoundaryKind
        if parse_enum(enum, given) is not parse_enum(enum, header[key]):
            raise FormatError(
                f"{source}:1: header {key}={header[key]} does not match requested {key}={given}"
            )
    kind = parse_enum(TessellationKind, header.get("kind", kind or "square"))
    bc = parse_enum(BoundaryKind, header.get("bc", bc or "nonperiodic"))

    layers: List[List[List[int]]] = [[]]
    width = None
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if layers[-1]:
                layers.append([])
            continue
        cells = [c.strip() for c in line.split(",")]
        if any(c not in ("0", "1") for c in cells):
            raise FormatError(f"{source}:{lineno}: cells must be 0 or 1, got {line!r}")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(f"{source}:{lineno}: row has {len(cells)} cells, expected {width}")
        layers[-1].append([int(c) for c in cells])
    if not layers[-1]:
        layers.pop()
    if not layers:
        raise FormatError(f"{source}: no occupancy rows")
    heights = {len(layer) for layer in layers}
    if len(heights) != 1:
        raise FormatError(f"{source}: layers differ in row count {sorted(heights)}")
    arr = np.array(layers, dtype=np.int8)
    if kind is TessellationKind.CUBE:
        dims = Dims(arr.shape[2], arr.shape[1], arr.shape[0])
    else:
        if arr.shape[0] != 1:
            raise FormatError(f"{source}: {kind.value} grids are 2D but the file has {arr.shape[0]} layers")
        arr = arr[0]
        dims = Dims(arr.shape[1], arr.shape[0])
    if "dims" in header and Dims.of(header["dims"]) != dims:
        raise FormatError(f"{source}:1: header dims={header['dims']} but the rows give {dims}")
    meta = {k: v for k, v in header.items() if k not in ("format", "kind", "bc", "dims")}
    return make_grid(kind, dims, bc, arr.astype(bool), meta)


def read_occupancy(path: PathLike, kind=None, bc=None) -> OccupancyGrid:
    text = Path(path).read_text()
    return parse_occupancy(text, kind, bc, source=str(path))


def format_occupancy(grid: OccupancyGrid) -> str:
    head = [f"format={FORMAT_VERSION}", f"kind={grid.kind.value}", f"bc={grid.bc.value}",
            f"dims={grid.dims}"]
    head += [f"{k}={v}" for k, v in sorted(grid.meta.items()) if " " not in str(v)]
    out = ["# " + " ".join(head)]
    occ = grid.occupancy.astype(np.int8)
    layers = occ if occ.ndim == 3 else occ[None]
    for z, layer in enumerate(layers):
        if z:
            out.append("")
        out.extend(",".join(str(v) for v in row) for row in layer.tolist())
    return "\n".join(out) + "\n"


def write_occupancy(grid: OccupancyGrid, path: PathLike) -> None:
    Path(path).write_text(format_occupancy(grid))


# -- graphs ------------------------------------------------------------------

def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def read_graph(edges_path: PathLike, occupied_path: Optional[PathLike] = None) -> GeneralLattice:
    """Read a 1-based edge list (header ``# format=1 Z=n``) and occupied-vertex list."""
    text = Path(edges_path).read_text()
    first = text.splitlines()[0] if text else ""
    if not first.startswith("#"):
        raise FormatError(f"{edges_path}:1: missing '# format=1 Z=<n>' header")
    header = _header_fields(first)
    _check_version(header, f"{edges_path}:1")
    try:
        Z = int(header["Z"])
    except (KeyError, ValueError):
        raise FormatError(f"{edges_path}:1: header must declare Z") from None
    edges = []
    for lineno, line in _data_lines(text):
        parts = [p.strip() for p in line.split(",")]
        try:
            i, j = (int(p) for p in parts)
        except ValueError:
            raise FormatError(f"{edges_path}:{lineno}: expected 'i,j', got {line!r}") from None
        for v in (i, j):
            if not 1 <= v <= Z:
                raise FormatError(f"{edges_path}:{lineno}: vertex {v} outside 1..{Z}")
        if i == j:
            raise FormatError(f"{edges_path}:{lineno}: self-loop at vertex {i}")
        edges.append((i - 1, j - 1))
    occupied = []
    if occupied_path is not None:
        otext = Path(occupied_path).read_text()
        for lineno, line in _data_lines(otext):
            try:
                v = int(line)
            except ValueError:
                raise FormatError(f"{occupied_path}:{lineno}: expected a vertex id, got {line!r}") from None
            if not 1 <= v <= Z:
                raise FormatError(f"{occupied_path}:{lineno}: vertex {v} outside 1..{Z}")
            occupied.append(v - 1)
    meta = {k: v for k, v in header.items() if k not in ("format", "Z")}
    return GeneralLattice.from_edges(Z, edges, occupied, meta)


def write_graph(lattice: GeneralLattice, edges_path: PathLike,
                occupied_path: Optional[PathLike] = None) -> None:
    head = [f"format={FORMAT_VERSION}", f"Z={lattice.Z}"]
    head += [f"{k}={v}" for k, v in sorted(lattice.meta.items()) if " " not in str(v)]
    lines = ["# " + " ".join(head)]
    lines += [f"{i + 1},{j + 1}" for i, j in lattice.edges.tolist()]
    Path(edges_path).write_text("\n".join(lines) + "\n")
    if occupied_path is not None:
        occ = [f"# format={FORMAT_VERSION}"] + [str(v + 1) for v in lattice.occupied.tolist()]
        Path(occupied_path).write_text("\n".join(occ) + "\n")


# -- profiles ----------------------------------------------------------------

def format_profile(profile: PcfProfile, plot: bool = False) -> str:
    if plot:
        lines = []
        if profile.meta.get("seed") is not None:
            lines.append(f"# seed={profile.meta['seed']}")
        lines.append("m,f")
        lines += [f"{m},{_fmt(f)}" for m, f in zip(profile.m, profile.f)]
        return "\n".join(lines) + "\n"
    lines = [f"# format={FORMAT_VERSION}"]
    for key in sorted(profile.meta):
        value = str(profile.meta[key])
        if "\n" in value:
            raise FormatError(f"metadata value for {key!r} spans lines")
        lines.append(f"# {key}={value}")
    lines.append("m,count,expected,f")
    for m, c, e, f in zip(profile.m, profile.count, profile.expected, profile.f):
        lines.append(f"{m},{_fmt(c)},{_fmt(e)},{_fmt(f)}")
    return "\n".join(lines) + "\n"


def write_profile(profile: PcfProfile, path: PathLike, plot: bool = False) -> None:
    Path(path).write_text(format_profile(profile, plot))


def _number(text: str) -> Union[int, float]:
    return int(text) if re.fullmatch(r"-?\d+", text) else float(text)


def parse_profile(text: str, source: str = "<text>") -> PcfProfile:
    meta: Dict[str, str] = {}
    rows: List[Tuple] = []
    columns = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                continue
            key, value = body.split("=", 1)
            if key == "format":
                _check_version({"format": value}, f"{source}:{lineno}")
                continue
            meta[key] = value
            continue
        if columns is None:
            columns = [c.strip() for c in line.split(",")]
            if columns not in (["m", "count", "expected", "f"], ["m", "f"]):
                raise FormatError(f"{source}:{lineno}: unexpected columns {line!r}")
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(columns):
            raise FormatError(f"{source}:{lineno}: expected {len(columns)} fields")
        try:
            rows.append(tuple(_number(c) for c in cells))
        except ValueError:
            raise FormatError(f"{source}:{lineno}: non-numeric field in {line!r}") from None
    if columns is None:
        raise FormatError(f"{source}: no profile data")
    if columns == ["m", "f"]:
        rows = [(m, 0, math.nan, f) for m, f in rows]
    m = tuple(int(r[0]) for r in rows)
    return PcfProfile(m, tuple(r[1] for r in rows), tuple(r[2] for r in rows),
                      tuple(r[3] for r in rows), meta)


def read_profile(path: PathLike) -> PcfProfile:
    return parse_profile(Path(path).read_text(), source=str(path))


# -- netpbm images -----------------------------------------------------------

_MAGIC = {b"P2": (1, False), b"P3": (3, False), b"P5": (1, True), b"P6": (3, True)}


def _sniff(data: bytes) -> str:
    if data.startswith(b"\x89PNG"):
        return "PNG"
    if data.startswith(b"\xff\xd8"):
        return "JPEG"
    if data[:2] in (b"GI", b"BM"):
        return {b"GI": "GIF", b"BM": "BMP"}[data[:2]]
    if data[:2] in (b"P1", b"P4"):
        return "PBM (" + data[:2].decode() + ")"
    if data[:2] == b"P7":
        return "PAM (P7)"
    return "unknown"


def _header_tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("truncated netpbm header")
        tokens.append(data[start:pos])
    return tokens, pos


def decode_netpbm(data: bytes) -> np.ndarray:
    """Pixel array of shape ``(height, width, channels)`` from a PGM or PPM file."""
    magic = data[:2]
    if magic not in _MAGIC:
        raise FormatError(f"unsupported image format: {_sniff(data)}; expected PGM or PPM (P2/P3/P5/P6)")
    channels, binary = _MAGIC[magic]
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise FormatError("malformed netpbm header") from None
    if width < 1 or height < 1 or not 1 <= maxval <= 65535:
        raise FormatError(f"bad netpbm geometry {width}x{height} maxval={maxval}")
    count = width * height * channels
    if binary:
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(data) - pos < count * dtype.itemsize:
            raise FormatError("netpbm pixel data is truncated")
        values = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)
    else:
        text = re.sub(rb"#[^\n]*", b"", data[pos:])
        parts = text.split()
        if len(parts) < count:
            raise FormatError("netpbm pixel data is truncated")
        values = np.array([int(p) for p in parts[:count]], dtype=np.int64)
    if values.max(initial=0) > maxval:
        raise FormatError("pixel value exceeds maxval")
    return values.reshape(height, width, channels)


def threshold_pixels(pixels: np.ndarray, threshold=DEFAULT_THRESHOLD) -> np.ndarray:
    """Occupied where every channel is strictly above ``threshold``."""
    return (np.asarray(pixels) > threshold).all(axis=-1)


def read_image(path: PathLike, threshold=DEFAULT_THRESHOLD) -> OccupancyGrid:
    """Threshold a PGM/PPM image into a non-periodic square grid.

    Image row 1 (top) becomes ``y = 1``; the image width is ``Lx``.
    """
    data = Path(path).read_bytes()
    pixels = decode_netpbm(data)
    occ = threshold_pixels(pixels, threshold)
    h, w = occ.shape
    meta = {
        "source": Path(path).name,
        "threshold": str(threshold),
        "rule": "all-channels-strictly-above",
    }
    return make_grid(TessellationKind.SQUARE, Dims(w, h), BoundaryKind.NONPERIODIC, occ, meta)


def encode_netpbm(pixels: np.ndarray, binary: bool = True, maxval: int = 255) -> bytes:
    """Encode ``(h, w)`` or ``(h, w, 3)`` integer pixels as PGM/PPM."""
    px = np.asarray(pixels, dtype=np.int64)
    channels = 1 if px.ndim == 2 else px.shape[2]
    if channels not in (1, 3):
        raise FormatError("netpbm holds 1 or 3 channels")
    h, w = px.shape[:2]
    magic = {(1, False): "P2", (3, False): "P3", (1, True): "P5", (3, True): "P6"}[(channels, binary)]
    head = f"{magic}\n{w} {h}\n{maxval}\n".encode()
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        return head + px.astype(dtype).tobytes()
    rows = px.reshape(h, -1)
    return head + ("\n".join(" ".join(str(v) for v in row) for row in rows.tolist()) + "\n").encode()
