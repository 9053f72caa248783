"""Set distances between estimated and reference supports."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyBoundary, EmptyCloud, GridMismatch
from .geometry import PointCloud
from .rconvex import ArcSegment, LineSegment, MembershipGrid, RConvexHull, grid_centers

DEFAULT_GRID = 334
BOUNDARY_SAMPLES = 10_000


@dataclass(frozen=True)
class MetricReport:
    d_mu: float
    d_H: float
    d_H_boundary: float
    grid_resolution: int

    def to_dict(self):
        return {"d_mu": self.d_mu, "d_H": self.d_H, "d_H_boundary": self.d_H_boundary,
                "grid_resolution": self.grid_resolution}


def _check_grids(a: MembershipGrid, b: MembershipGrid):
    if tuple(a.resolution) != tuple(b.resolution) or not np.allclose(a.box, b.box, rtol=0, atol=0):
        raise GridMismatch(f"grids differ: {a.box} {a.resolution} vs {b.box} {b.resolution}")


def distance_in_measure(memb_a: MembershipGrid, memb_b: MembershipGrid) -> float:
    """Area of the symmetric difference, counted in grid cells."""
    _check_grids(memb_a, memb_b)
    diff = int(np.count_nonzero(memb_a.mask != memb_b.mask))
    return diff * memb_a.cell_area


def _as_points(x):
    if isinstance(x, PointCloud):
        return x.points
    return np.asarray(x, dtype=float).reshape(-1, 2)


def hausdorff_points(a, b) -> float:
    """Hausdorff distance between two finite point sets."""
    pa, pb = _as_points(a), _as_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyCloud("Hausdorff distance needs two nonempty sets")
    dab, _ = cKDTree(pb).query(pa)
    dba, _ = cKDTree(pa).query(pb)
    return float(max(dab.max(), dba.max()))


def sample_pieces(pieces, total=BOUNDARY_SAMPLES, points=()):
    """Points spread uniformly in arclength over arcs and segments.

    ``points`` are isolated boundary points appended as they are."""
    pieces = list(pieces)
    lengths = np.array([p.length for p in pieces], dtype=float)
    extra = np.asarray(points, dtype=float).reshape(-1, 2)
    L = float(lengths.sum())
    out = []
    if pieces and L > 0:
        for p, l in zip(pieces, lengths):
            k = max(2, int(math.ceil(total * l / L)) + 1)
            out.append(p.sample(k))
    out.append(extra)
    return np.concatenate(out) if out else extra


def boundary_points(obj, total=BOUNDARY_SAMPLES):
    """Dense boundary sampling of a hull, a piece list, a model or a point array."""
    if isinstance(obj, RConvexHull):
        lone = [obj.source.points[c.vertices[0]] for c in obj.cycles if c.is_singleton]
        pts = sample_pieces(obj.pieces(), total, lone)
    elif hasattr(obj, "boundary_pieces"):
        pts = sample_pieces(obj.boundary_pieces(), total)
    elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], (ArcSegment, LineSegment)):
        pts = sample_pieces(obj, total)
    else:
        pts = np.asarray(obj, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyBoundary("boundary is empty")
    return pts


def hausdorff_boundary(hull, reference_boundary, samples: int = BOUNDARY_SAMPLES) -> float:
    """Hausdorff distance between the two boundaries, both densely sampled."""
    return hausdorff_points(boundary_points(hull, samples), boundary_points(reference_boundary, samples))


def rasterize_region(region, box, resolution) -> MembershipGrid:
    """Grid membership for anything with a vectorised ``contains``."""
    if isinstance(region, RConvexHull):
        return region.rasterize(box, resolution)
    pts, (nx, ny) = grid_centers(box, resolution)
    mask = np.asarray(region.contains(pts), dtype=bool).reshape(ny, nx)
    mask.setflags(write=False)
    return MembershipGrid(tuple(float(v) for v in box), (nx, ny), mask)


def hausdorff_sets(memb_a: MembershipGrid, memb_b: MembershipGrid) -> float:
    """Hausdorff distance between the inside cell centres of two grids."""
    _check_grids(memb_a, memb_b)
    pts, _ = grid_centers(memb_a.box, memb_a.resolution)
    a = pts[memb_a.mask.ravel()]
    b = pts[memb_b.mask.ravel()]
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return math.inf
    return hausdorff_points(a, b)


def compare(estimate, reference, box=(0.0, 1.0, 0.0, 1.0), grid: int = DEFAULT_GRID,
            samples: int = BOUNDARY_SAMPLES) -> MetricReport:
    """All three distances between an estimate and a reference region."""
    ga = rasterize_region(estimate, box, grid)
    gb = rasterize_region(reference, box, grid)
    return MetricReport(distance_in_measure(ga, gb), hausdorff_sets(ga, gb),
                        hausdorff_boundary(estimate, reference, samples), int(grid))
