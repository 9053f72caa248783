"""Point CSV, boundary polylines and membership-grid files."""

from __future__ import annotations

import hashlib
import io
import math

import numpy as np

from .errors import ParseError
from .geometry import PointCloud
from .rconvex import MembershipGrid


def read_points(path, label=None) -> PointCloud:
    """Read ``x,y`` rows. A header ``x,y`` is optional, ``#`` starts a
    comment line and blank lines are skipped."""
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc})") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    seen_data = False
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = [p.strip() for p in s.split(",")]
        if not seen_data and [p.lower() for p in parts] == ["x", "y"]:
            seen_data = True
            continue
        seen_data = True
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 fields, got {len(parts)}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: cannot parse {s!r} as two numbers") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"{path}:{lineno}: non-finite coordinate")
        rows.append((x, y))
    pts = np.array(rows, dtype=float).reshape(-1, 2)
    return PointCloud.from_points(pts, label if label is not None else str(path))


def format_points(points) -> str:
    buf = io.StringIO()
    buf.write("x,y\n")
    for x, y in np.asarray(points, dtype=float).reshape(-1, 2):
        buf.write(f"{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


def write_points(path, points):
    if isinstance(points, PointCloud):
        points = points.points
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_points(points))


def format_boundary(hull, per_arc: int = 64) -> str:
    """One row per polyline vertex: ``cycle,piece,x,y``. Arcs are sampled
    with ``per_arc`` points; isolated points appear as a single row."""
    buf = io.StringIO()
    buf.write("cycle,piece,x,y\n")
    for ci, cyc in enumerate(hull.cycles):
        if cyc.is_singleton:
            x, y = hull.source.points[cyc.vertices[0]]
            buf.write(f"{ci},0,{float(x)!r},{float(y)!r}\n")
            continue
        for pi, piece in enumerate(cyc.pieces):
            for x, y in piece.sample(per_arc):
                buf.write(f"{ci},{pi},{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


def format_grid(grid: MembershipGrid) -> str:
    """Plain-text grid: a header with box and resolution, then one row of
    0/1 characters per grid row, bottom row first."""
    xmin, xmax, ymin, ymax = grid.box
    nx, ny = grid.resolution
    lines = [f"# rhull-grid box={xmin!r},{xmax!r},{ymin!r},{ymax!r} resolution={nx},{ny}"]
    for row in grid.mask:
        lines.append("".join("1" if v else "0" for v in row))
    return "\n".join(lines) + "\n"


def read_grid(path) -> MembershipGrid:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# rhull-grid "):
        raise ParseError(f"{path}:1: not a grid file")
    try:
        fields = dict(kv.split("=") for kv in lines[0][len("# rhull-grid "):].split())
        box = tuple(float(v) for v in fields["box"].split(","))
        nx, ny = (int(v) for v in fields["resolution"].split(","))
    except (KeyError, ValueError):
        raise ParseError(f"{path}:1: malformed grid header") from None
    body = lines[1:]
    if len(body) != ny or any(len(r) != nx or set(r) - {"0", "1"} for r in body):
        raise ParseError(f"{path}: grid body does not match resolution {nx}x{ny}")
    mask = np.array([[c == "1" for c in r] for r in body], dtype=bool)
    mask.setflags(write=False)
    return MembershipGrid(box, (nx, ny), mask)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
