"""Planar geometry kernels: point clouds, Delaunay, hulls, MST, neighbours."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import Delaunay, cKDTree

from .errors import AllCollinear, EmptyCloud, TooFewPoints
from .predicates import incircle, incircle_many, orient2d, orient2d_many


def _readonly(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointCloud:
    """An ordered sample of distinct 2D points.

    Use :meth:`from_points` to build one from raw coordinates; it rejects
    non-finite values and drops exact duplicates with a warning.
    """

    points: np.ndarray
    label: str = ""

    @classmethod
    def from_points(cls, points, label=""):
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        if len(pts):
            _, first = np.unique(pts, axis=0, return_index=True)
            if len(first) < len(pts):
                keep = np.sort(first)
                warnings.warn(f"dropped {len(pts) - len(keep)} duplicate point(s)",
                              stacklevel=2)
                pts = pts[keep]
        return cls(_readonly(pts), label)

    def __len__(self):
        return len(self.points)

    @property
    def n(self):
        return len(self.points)

    @cached_property
    def kdtree(self):
        if self.n == 0:
            raise EmptyCloud("cloud has no points")
        return cKDTree(self.points)

    @cached_property
    def diameter(self):
        if self.n < 2:
            return 0.0
        hull = self.points[_hull_indices(self.points)] if self.n >= 3 else self.points
        d = np.sqrt(((hull[:, None, :] - hull[None, :, :]) ** 2).sum(-1))
        return float(d.max())

    @cached_property
    def edges(self):
        return delaunay_edges(self)


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Delaunay triangulation with counterclockwise triangles.

    ``neighbors[t, k]`` is the triangle across the edge opposite
    ``triangles[t, k]``, or -1 on the convex hull.
    """

    points: np.ndarray
    triangles: np.ndarray
    neighbors: np.ndarray

    @property
    def vertices(self):
        return np.arange(len(self.points))


@dataclass(frozen=True, eq=False)
class EdgeSet:
    """Undirected Delaunay edges ``i < j`` with the third vertex of the
    triangle on each side of the directed edge ``i -> j`` (-1 if none).

    Collinear clouds are represented by the chain of consecutive points with
    no triangles, which is still the dual of their Voronoi diagram.
    """

    i: np.ndarray
    j: np.ndarray
    left: np.ndarray
    right: np.ndarray
    nbr_ptr: np.ndarray = field(repr=False)
    nbr_idx: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.i)

    def neighbors_of(self, p):
        return self.nbr_idx[self.nbr_ptr[p]:self.nbr_ptr[p + 1]]


def _check_cloud(cloud, minimum=3):
    if cloud.n == 0:
        raise EmptyCloud("cloud has no points")
    if cloud.n < minimum:
        raise TooFewPoints(f"need at least {minimum} points, got {cloud.n}")


def _all_collinear(pts):
    a = pts[0]
    far = np.argmax(((pts - a) ** 2).sum(1))
    b = pts[far]
    rest = np.delete(np.arange(len(pts)), [0, far])
    if len(rest) == 0:
        return True
    s = orient2d_many(np.broadcast_to(a, (len(rest), 2)),
                      np.broadcast_to(b, (len(rest), 2)), pts[rest])
    return bool(np.all(s == 0))


def _legalize(pts, tris):
    """Lawson flips with exact predicates until every edge is Delaunay.

    Cocircular quadrilaterals keep the diagonal that contains the lowest
    vertex index, which makes the output unique for degenerate inputs.
    """
    tris = [list(t) for t in tris]
    owner = {}
    for t, (a, b, c) in enumerate(tris):
        owner[(a, b)] = t
        owner[(b, c)] = t
        owner[(c, a)] = t

    def opposite(t, a, b):
        for v in tris[t]:
            if v != a and v != b:
                return v

    def needs_flip(a, b):
        t1 = owner.get((a, b))
        t2 = owner.get((b, a))
        if t1 is None or t2 is None:
            return False
        c = opposite(t1, a, b)
        d = opposite(t2, a, b)
        s = incircle(pts[a], pts[b], pts[c], pts[d])
        return s > 0 or (s == 0 and min(c, d) < min(a, b))

    # vectorised first pass; only suspicious edges go through the stack
    keys = [(a, b) for (a, b) in owner if a < b and (b, a) in owner]
    stack = []
    if keys:
        ab = np.array(keys)
        c = np.array([opposite(owner[(a, b)], a, b) for a, b in keys])
        d = np.array([opposite(owner[(b, a)], a, b) for a, b in keys])
        s = incircle_many(pts[ab[:, 0]], pts[ab[:, 1]], pts[c], pts[d])
        tie = (s == 0) & (np.minimum(c, d) < ab.min(1))
        stack = [tuple(e) for e in ab[(s > 0) | tie]]

    while stack:
        a, b = stack.pop()
        if not needs_flip(a, b):
            continue
        t1, t2 = owner[(a, b)], owner[(b, a)]
        c = opposite(t1, a, b)
        d = opposite(t2, a, b)
        for e in ((a, b), (b, a), (b, c), (c, a), (a, d), (d, b)):
            owner.pop(e, None)
        tris[t1] = [a, d, c]
        tris[t2] = [d, b, c]
        for t in (t1, t2):
            x, y, z = tris[t]
            owner[(x, y)] = t
            owner[(y, z)] = t
            owner[(z, x)] = t
        stack.extend([(a, d), (d, b), (b, c), (c, a)])
    return np.array(tris, dtype=np.intp)


def _neighbors(tris):
    owner = {}
    for t, (a, b, c) in enumerate(tris):
        owner[(a, b)] = t
        owner[(b, c)] = t
        owner[(c, a)] = t
    nb = np.full(tris.shape, -1, dtype=np.intp)
    for t, (a, b, c) in enumerate(tris):
        nb[t, 0] = owner.get((c, b), -1)
        nb[t, 1] = owner.get((a, c), -1)
        nb[t, 2] = owner.get((b, a), -1)
    return nb


def delaunay(cloud: PointCloud) -> Triangulation:
    """Delaunay triangulation of a cloud that is not entirely collinear."""
    _check_cloud(cloud)
    pts = cloud.points
    if _all_collinear(pts):
        raise AllCollinear("all points are collinear")
    tris = Delaunay(pts).simplices.astype(np.intp)
    o = orient2d_many(pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]])
    tris[o < 0] = tris[o < 0][:, [0, 2, 1]]
    if np.any(o == 0):
        # qhull can emit slivers on collinear hull runs; they carry no area
        tris = tris[o != 0]
    tris = _legalize(pts, tris)
    # canonical rotation: smallest index first, then sort rows
    rot = np.argmin(tris, axis=1)
    tris = np.stack([tris[np.arange(len(tris)), (rot + k) % 3] for k in range(3)], 1)
    tris = tris[np.lexsort(tris.T[::-1])]
    return Triangulation(pts, tris, _neighbors(tris))


def delaunay_edges(cloud: PointCloud) -> EdgeSet:
    """Dual edge structure of the Voronoi diagram, also for degenerate clouds."""
    n = cloud.n
    if n == 0:
        raise EmptyCloud("cloud has no points")
    pts = cloud.points
    if n < 3 or _all_collinear(pts):
        d = pts - pts[0]
        axis = pts[np.argmax((d ** 2).sum(1))] - pts[0]
        order = np.argsort(d @ axis, kind="stable")
        a, b = order[:-1], order[1:]
        i, j = np.minimum(a, b), np.maximum(a, b)
        left = np.full(len(i), -1, dtype=np.intp)
        right = left.copy()
    else:
        tri = delaunay(cloud).triangles
        heads = tri.reshape(-1)
        tails = tri[:, [1, 2, 0]].reshape(-1)
        third = tri[:, [2, 0, 1]].reshape(-1)
        lo, hi = np.minimum(heads, tails), np.maximum(heads, tails)
        key = lo * n + hi
        uniq, inv = np.unique(key, return_inverse=True)
        i, j = uniq // n, uniq % n
        left = np.full(len(uniq), -1, dtype=np.intp)
        right = left.copy()
        fwd = heads < tails
        left[inv[fwd]] = third[fwd]
        right[inv[~fwd]] = third[~fwd]
    both = np.concatenate([i, j])
    other = np.concatenate([j, i])
    order = np.lexsort((other, both))
    ptr = np.searchsorted(both[order], np.arange(n + 1))
    return EdgeSet(i.astype(np.intp), j.astype(np.intp), left, right,
                   ptr.astype(np.intp), other[order].astype(np.intp))


def _hull_indices(pts):
    """Andrew's monotone chain with exact orientation; counterclockwise."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))

    def chain(idx):
        out = []
        for k in idx:
            while len(out) >= 2 and orient2d(pts[out[-2]], pts[out[-1]], pts[k]) <= 0:
                out.pop()
            out.append(int(k))
        return out

    lower = chain(order)
    upper = chain(order[::-1])
    return np.array(lower[:-1] + upper[:-1], dtype=np.intp)


def convex_hull(cloud: PointCloud) -> np.ndarray:
    """Vertices of the convex hull, counterclockwise, as an (h, 2) array."""
    _check_cloud(cloud)
    if _all_collinear(cloud.points):
        raise AllCollinear("all points are collinear")
    return cloud.points[_hull_indices(cloud.points)]


def convex_hull_indices(cloud: PointCloud) -> np.ndarray:
    _check_cloud(cloud)
    if _all_collinear(cloud.points):
        raise AllCollinear("all points are collinear")
    return _hull_indices(cloud.points)


def euclidean_mst(cloud: PointCloud):
    """Minimum spanning tree edges ``(m, 2)`` and their lengths.

    In the plane the MST is a subgraph of the Delaunay graph, so only those
    edges are offered to the spanning-tree routine.
    """
    _check_cloud(cloud, minimum=2)
    e = cloud.edges
    pts = cloud.points
    w = np.hypot(*(pts[e.i] - pts[e.j]).T)
    # csgraph treats explicit zeros as missing edges; lengths are positive
    g = coo_matrix((w, (e.i, e.j)), shape=(cloud.n, cloud.n)).tocsr()
    t = minimum_spanning_tree(g).tocoo()
    order = np.lexsort((t.col, t.row))
    edges = np.stack([t.row[order], t.col[order]], 1).astype(np.intp)
    return edges, t.data[order]


def nearest_sample_distance(x, cloud: PointCloud):
    """Distance from ``x`` (a point or an (m, 2) array) to the nearest sample."""
    if cloud.n == 0:
        raise EmptyCloud("cloud has no points")
    d, _ = cloud.kdtree.query(np.asarray(x, dtype=float))
    return d
