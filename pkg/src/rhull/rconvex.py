"""r-convex hulls of planar samples.

Write ``U_r`` for the union of open r-discs around the sample points and
``E_r`` for its complement, the set of centres of open r-discs that miss the
sample. The r-convex hull is ``C_r = complement of (E_r + open r-disc)``:

* ``x`` is in ``C_r`` iff ``d(x, sample) < r`` and no arc of ``boundary(U_r)``
  lies closer than ``r`` to ``x``;
* for ``x`` in ``C_r`` the distance to the boundary of ``C_r`` equals
  ``d(x, E_r) - r``.

``boundary(U_r)`` is made of arcs of the circles ``|x - p| = r`` clipped to
the Voronoi cell of ``p``; their end points ("corners") sit on Voronoi edges.
Every corner ``c`` on the edge ``pq`` contributes the minor arc of the circle
``|x - c| = r`` between ``p`` and ``q`` to ``boundary(C_r)``, possibly cut
where it crosses another corner arc. Those arcs bulge into ``C_r`` and are
traversed clockwise around their centres, keeping the region on the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import AllCollinear, EmptyBoundary, InvalidRadius
from .geometry import PointCloud, _all_collinear, _check_cloud, convex_hull_indices
from .kernels import ArcSet
from .predicates import orient2d_many

TWO_PI = 2.0 * math.pi
# relative slack when deciding whether a point sits exactly on the boundary
_ON_BOUNDARY = 1e-10
_MEMBER_TOL = 1e-12
_ANGLE_EPS = 1e-12


@dataclass(frozen=True)
class ArcSegment:
    """Arc of the circle ``|x - center| = radius`` traversed from
    ``start_angle`` to ``end_angle`` (both in ``[0, 2pi)``), counterclockwise
    when ``ccw`` is true. A full circle has equal angles and ``full=True``."""

    center: tuple
    radius: float
    start_angle: float
    end_angle: float
    ccw: bool = True
    full: bool = False

    @property
    def span(self):
        if self.full:
            return TWO_PI
        d = (self.end_angle - self.start_angle) if self.ccw else (self.start_angle - self.end_angle)
        return d % TWO_PI

    def point_at(self, t):
        """Point at fraction ``t`` in [0, 1] along the traversal."""
        t = np.asarray(t, dtype=float)
        sign = 1.0 if self.ccw else -1.0
        a = self.start_angle + sign * self.span * t
        return np.stack([self.center[0] + self.radius * np.cos(a),
                         self.center[1] + self.radius * np.sin(a)], -1)

    @property
    def start_point(self):
        return self.point_at(0.0)

    @property
    def end_point(self):
        return self.point_at(1.0)

    @property
    def length(self):
        return self.radius * self.span

    def sample(self, k):
        return self.point_at(np.linspace(0.0, 1.0, max(int(k), 2)))


@dataclass(frozen=True)
class LineSegment:
    """Straight boundary piece, used when ``r`` is infinite."""

    start: tuple
    end: tuple

    @property
    def start_point(self):
        return np.asarray(self.start, dtype=float)

    @property
    def end_point(self):
        return np.asarray(self.end, dtype=float)

    @property
    def length(self):
        return float(np.hypot(*(self.end_point - self.start_point)))

    def point_at(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        return self.start_point + t * (self.end_point - self.start_point)

    def sample(self, k):
        return self.point_at(np.linspace(0.0, 1.0, max(int(k), 2)))


@dataclass(frozen=True)
class Cycle:
    """A connected component of the boundary.

    ``pieces`` is a closed chain of arcs (empty for an isolated sample
    point); ``vertices`` lists the sample indices it touches.
    """

    pieces: tuple
    vertices: tuple

    @property
    def is_singleton(self):
        return not self.pieces


@dataclass(frozen=True, eq=False)
class MembershipGrid:
    """Inside/outside flags at the cell centres of a regular grid.

    ``mask[row, col]`` refers to the cell centre
    ``(xmin + (col + .5) * dx, ymin + (row + .5) * dy)``.
    """

    box: tuple
    resolution: tuple
    mask: np.ndarray

    @property
    def cell_area(self):
        xmin, xmax, ymin, ymax = self.box
        return (xmax - xmin) * (ymax - ymin) / (self.resolution[0] * self.resolution[1])


def grid_centers(box, resolution):
    xmin, xmax, ymin, ymax = (float(v) for v in box)
    if np.isscalar(resolution):
        resolution = (int(resolution), int(resolution))
    nx, ny = (int(v) for v in resolution)
    if nx < 2 or ny < 2:
        raise ValueError("grid resolution must be at least 2 per axis")
    xs = xmin + (np.arange(nx) + 0.5) * (xmax - xmin) / nx
    ys = ymin + (np.arange(ny) + 0.5) * (ymax - ymin) / ny
    gx, gy = np.meshgrid(xs, ys)
    return np.stack([gx.ravel(), gy.ravel()], 1), (nx, ny)


# ---------------------------------------------------------------------------
# corners and the dilation boundary


@dataclass(frozen=True, eq=False)
class Corners:
    """Points on Voronoi edges at distance exactly ``r`` from both sites.

    ``side`` is +1 when the corner lies left of the directed edge ``a -> b``.
    """

    xy: np.ndarray
    a: np.ndarray
    b: np.ndarray
    side: np.ndarray
    edge: np.ndarray

    def __len__(self):
        return len(self.a)


def find_corners(cloud: PointCloud, r: float) -> Corners:
    e = cloud.edges
    P = cloud.points
    pi, pj = P[e.i], P[e.j]
    dv = pj - pi
    L = np.hypot(dv[:, 0], dv[:, 1])
    ok = L < 2.0 * r
    h = np.sqrt(np.maximum(r * r - 0.25 * L * L, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        nrm = np.stack([-dv[:, 1], dv[:, 0]], 1) / L[:, None]
    mid = 0.5 * (pi + pj)
    out = []
    for side in (1, -1):
        c = mid + side * h[:, None] * nrm
        # an obtuse neighbour moves its circumcentre across the edge, so a
        # corner must clear the third vertex on both sides
        valid = ok.copy()
        for third in (e.left, e.right):
            has = third >= 0
            s = P[np.where(has, third, 0)]
            valid &= ~has | (((c - s) ** 2).sum(1) >= r * r)
        idx = np.flatnonzero(valid)
        out.append((c[idx], e.i[idx], e.j[idx], np.full(len(idx), side), idx))
    xy = np.concatenate([o[0] for o in out]).reshape(-1, 2)
    a = np.concatenate([o[1] for o in out]).astype(np.intp)
    b = np.concatenate([o[2] for o in out]).astype(np.intp)
    side = np.concatenate([o[3] for o in out]).astype(np.int8)
    edge = np.concatenate([o[4] for o in out]).astype(np.intp)
    order = np.lexsort((side, edge))
    return Corners(xy[order], a[order], b[order], side[order], edge[order])


@dataclass(frozen=True, eq=False)
class DilationArcs:
    """Arcs of ``boundary(U_r)``: for each arc, its sample index, the
    counterclockwise start angle and the span."""

    r: float
    owner: np.ndarray
    start: np.ndarray
    span: np.ndarray
    points: np.ndarray

    def __len__(self):
        return len(self.owner)

    @cached_property
    def arcset(self):
        c = self.points[self.owner]
        return ArcSet(c[:, 0], c[:, 1], np.full(len(self.owner), self.r),
                      self.start, self.span)

    def segments(self):
        out = []
        for p, s, w in zip(self.owner, self.start, self.span):
            full = w >= TWO_PI
            out.append(ArcSegment(tuple(self.points[p]), self.r, float(s % TWO_PI),
                                  float((s + w) % TWO_PI), True, bool(full)))
        return out


def _in_voronoi_cell(cloud, owner, theta, r):
    """Whether ``p + r (cos theta, sin theta)`` lies in the Voronoi cell of p."""
    e = cloud.edges
    P = cloud.points
    deg = np.diff(e.nbr_ptr)[owner]
    rep = np.repeat(np.arange(len(owner)), deg)
    offs = np.arange(deg.sum()) - np.repeat(np.cumsum(deg) - deg, deg)
    nb = e.nbr_idx[e.nbr_ptr[owner][rep] + offs]
    dq = P[nb] - P[owner][rep]
    u = np.stack([np.cos(theta), np.sin(theta)], 1)[rep]
    viol = r * (u * dq).sum(1) > 0.5 * (dq ** 2).sum(1)
    bad = np.bincount(rep[viol], minlength=len(owner)) > 0
    return ~bad


def dilation_arcs(cloud: PointCloud, r: float, corners: Corners | None = None) -> DilationArcs:
    if corners is None:
        corners = find_corners(cloud, r)
    P = cloud.points
    n = cloud.n
    pt = np.concatenate([corners.a, corners.b])
    cxy = np.concatenate([corners.xy, corners.xy])
    ang = np.mod(np.arctan2(cxy[:, 1] - P[pt, 1], cxy[:, 0] - P[pt, 0]), TWO_PI)
    order = np.lexsort((ang, pt))
    pt, ang = pt[order], ang[order]
    first = np.searchsorted(pt, np.arange(n), side="left")
    last = np.searchsorted(pt, np.arange(n), side="right")
    cnt = last - first
    # gap k runs from entry k to the next entry of the same point (cyclic)
    nxt = np.arange(len(pt)) + 1
    wrap = nxt == last[pt]
    nxt[wrap] = first[pt[wrap]]
    span = np.mod(ang[nxt] - ang, TWO_PI)
    span[cnt[pt] == 1] = TWO_PI
    bare = np.flatnonzero(cnt == 0)
    owner = np.concatenate([pt, bare])
    start = np.concatenate([ang, np.zeros(len(bare))])
    span = np.concatenate([span, np.full(len(bare), TWO_PI)])
    keep = span > 0
    owner, start, span = owner[keep], start[keep], span[keep]
    inside = _in_voronoi_cell(cloud, owner, start + 0.5 * span, r)
    return DilationArcs(float(r), owner[inside], start[inside], span[inside], P)


def dilation_boundary(cloud: PointCloud, rho: float) -> list:
    """Arcs bounding the union of open rho-discs around the sample."""
    if not rho > 0:
        raise InvalidRadius(f"rho must be positive, got {rho}")
    return dilation_arcs(cloud, rho).segments()


# ---------------------------------------------------------------------------
# the hull


class RConvexHull:
    """The r-convex hull of a cloud, with its boundary cycles.

    ``r`` may be ``math.inf``, in which case the hull is the convex hull and
    the boundary is polygonal.
    """

    def __init__(self, r, source, cycles, area, boundary_vertices, dilation, boundary):
        self.r = r
        self.source = source
        self.cycles = tuple(cycles)
        self.area = area
        self.boundary_vertices = boundary_vertices
        self._dilation = dilation
        self._boundary = boundary

    def __repr__(self):
        return (f"RConvexHull(r={self.r:g}, n={self.source.n}, area={self.area:.6g}, "
                f"cycles={self.cycle_count}, vertices={self.vertex_count})")

    @property
    def vertex_count(self):
        return len(self.boundary_vertices)

    @property
    def cycle_count(self):
        return len(self.cycles)

    @property
    def is_convex(self):
        return math.isinf(self.r)

    def pieces(self):
        return [p for c in self.cycles for p in c.pieces]

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        q = x.reshape(-1, 2)
        if self.is_convex:
            res = _in_convex_polygon(q, self._boundary)
        else:
            res = _in_rconvex(self.source, self._dilation, q, self.r)
        return res.reshape(x.shape[:-1]) if x.ndim > 1 else bool(res[0])

    def distance_to_boundary(self, x):
        x = np.asarray(x, dtype=float)
        q = x.reshape(-1, 2)
        if self.is_convex:
            d = _segments_distance(q, self._boundary)
        else:
            if len(self._boundary) == 0:
                raise EmptyBoundary("hull has no boundary")
            d = self._boundary.min_distance(q)
        return d.reshape(x.shape[:-1]) if x.ndim > 1 else float(d[0])

    def clearance(self, x):
        """``d(x, E_r) - r`` for points of the hull; equals the distance to the
        boundary there, computed from the dilation arcs instead."""
        q = np.asarray(x, dtype=float).reshape(-1, 2)
        if self.is_convex:
            return _segments_distance(q, self._boundary)
        return self._dilation.arcset.min_distance(q) - self.r

    def rasterize(self, box, resolution):
        pts, (nx, ny) = grid_centers(box, resolution)
        mask = self.contains(pts).reshape(ny, nx)
        mask.setflags(write=False)
        return MembershipGrid(tuple(float(v) for v in box), (nx, ny), mask)


def _in_rconvex(cloud, dil, q, r):
    near, _ = cloud.kdtree.query(q, distance_upper_bound=r)
    inside = near < r
    idx = np.flatnonzero(inside)
    if len(idx) and len(dil):
        # boundary points sit at distance r up to rounding; count them in
        scale = max(1.0, r, float(np.abs(cloud.points).max()))
        thr = r - _MEMBER_TOL * scale
        d = dil.arcset.min_distance(q[idx], stop_below=thr)
        inside[idx] = d >= thr
    return inside


def _in_convex_polygon(q, poly):
    a = poly
    b = np.roll(poly, -1, axis=0)
    ex = (b - a)[None, :, :]
    rel = q[:, None, :] - a[None, :, :]
    cross = ex[..., 0] * rel[..., 1] - ex[..., 1] * rel[..., 0]
    scale = np.hypot(ex[..., 0], ex[..., 1]) * 1e-12 * (1.0 + np.abs(q).max(1))[:, None]
    return np.all(cross >= -scale, axis=1)


def _segments_distance(q, poly):
    a = poly
    ab = np.roll(poly, -1, axis=0) - a
    ll = (ab ** 2).sum(1)
    best = np.full(len(q), np.inf)
    # blocks of queries against all edges at once
    step = max(1, 200000 // len(a))
    for s in range(0, len(q), step):
        rel = q[s:s + step, None, :] - a[None, :, :]
        t = np.clip((rel * ab).sum(-1) / ll, 0.0, 1.0)
        d = rel - t[..., None] * ab
        best[s:s + step] = np.sqrt((d ** 2).sum(-1).min(1))
    return best


def _segment_area(r, span):
    """Area between a chord and its arc, stable for tiny angles."""
    span = np.asarray(span, dtype=float)
    small = span < 1e-3
    s = np.where(small, 0.0, span - np.sin(span))
    t = span
    series = t ** 3 / 6.0 - t ** 5 / 120.0 + t ** 7 / 5040.0
    return 0.5 * r * r * np.where(small, series, s)


def _convex_hull_r(cloud):
    idx = convex_hull_indices(cloud)
    P = cloud.points
    poly = P[idx]
    a = poly
    b = np.roll(poly, -1, axis=0)
    area = 0.5 * float(np.sum(a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]))
    on = np.zeros(cloud.n, dtype=bool)
    on[idx] = True
    for k in range(len(a)):
        s = orient2d_many(np.broadcast_to(a[k], P.shape), np.broadcast_to(b[k], P.shape), P)
        t = (P - a[k]) @ (b[k] - a[k])
        on |= (s == 0) & (t >= 0) & (t <= (b[k] - a[k]) @ (b[k] - a[k]))
    verts = np.flatnonzero(on)
    pieces = tuple(LineSegment(tuple(a[k]), tuple(b[k])) for k in range(len(a)))
    cyc = Cycle(pieces, tuple(int(v) for v in verts))
    return RConvexHull(math.inf, cloud, [cyc], area, verts, None, poly)


def build_rconvex_hull(cloud: PointCloud, r: float) -> RConvexHull:
    """Construct ``C_r`` of the cloud, with boundary, area and vertex set."""
    if not (r > 0):
        raise InvalidRadius(f"r must be positive, got {r}")
    _check_cloud(cloud)
    if _all_collinear(cloud.points):
        raise AllCollinear("all points are collinear")
    if math.isinf(r):
        return _convex_hull_r(cloud)
    r = float(r)
    P = cloud.points
    n = cloud.n
    corners = find_corners(cloud, r)
    dil = dilation_arcs(cloud, r, corners)
    bverts = np.unique(dil.owner)

    # corners whose edge has corners on both sides only add a lens that the
    # two discs cover; their arcs never reach the boundary
    dup = np.zeros(len(corners), dtype=bool)
    if len(corners) > 1:
        same = corners.edge[1:] == corners.edge[:-1]
        dup[1:] |= same
        dup[:-1] |= same
    keep = np.flatnonzero(~dup)
    c = corners.xy[keep]
    a, b, side = corners.a[keep], corners.b[keep], corners.side[keep]
    # clockwise traversal: from b to a for left corners, a to b for right ones
    src = np.where(side > 0, b, a)
    dst = np.where(side > 0, a, b)
    chord = np.hypot(*(P[a] - P[b]).T)
    span = 2.0 * np.arcsin(np.minimum(1.0, chord / (2.0 * r)))
    # counterclockwise parametrisation starts at dst and ends at src
    cstart = np.mod(np.arctan2(P[dst, 1] - c[:, 1], P[dst, 0] - c[:, 0]), TWO_PI)

    m = len(keep)
    cuts = [[] for _ in range(m)]
    extra_nodes = []
    if m > 1:
        pairs = cKDTree(c).query_pairs(2.0 * r, output_type="ndarray")
        if len(pairs):
            k1, k2 = pairs[:, 0], pairs[:, 1]
            dv = c[k2] - c[k1]
            dd = np.hypot(dv[:, 0], dv[:, 1])
            ok = dd > 0
            k1, k2, dv, dd = k1[ok], k2[ok], dv[ok], dd[ok]
            hh = np.sqrt(np.maximum(r * r - 0.25 * dd * dd, 0.0))
            mid = 0.5 * (c[k1] + c[k2])
            perp = np.stack([-dv[:, 1], dv[:, 0]], 1) / dd[:, None]
            for sgn in (1.0, -1.0):
                x = mid + sgn * hh[:, None] * perp
                t1 = np.mod(np.arctan2(x[:, 1] - c[k1, 1], x[:, 0] - c[k1, 0]) - cstart[k1], TWO_PI)
                t2 = np.mod(np.arctan2(x[:, 1] - c[k2, 1], x[:, 0] - c[k2, 0]) - cstart[k2], TWO_PI)
                hit = ((t1 > _ANGLE_EPS) & (t1 < span[k1] - _ANGLE_EPS)
                       & (t2 > _ANGLE_EPS) & (t2 < span[k2] - _ANGLE_EPS))
                for i1, i2, u1, u2 in zip(k1[hit], k2[hit], t1[hit], t2[hit]):
                    node = n + len(extra_nodes)
                    extra_nodes.append(None)
                    cuts[i1].append((u1, node))
                    cuts[i2].append((u2, node))

    # sub-arcs in counterclockwise parameter order
    sub_k, sub_lo, sub_hi, sub_nlo, sub_nhi = [], [], [], [], []
    for k in range(m):
        pts = sorted(cuts[k])
        params = [0.0] + [u for u, _ in pts] + [float(span[k])]
        nodes = [int(dst[k])] + [nd for _, nd in pts] + [int(src[k])]
        for s in range(len(params) - 1):
            sub_k.append(k)
            sub_lo.append(params[s])
            sub_hi.append(params[s + 1])
            sub_nlo.append(nodes[s])
            sub_nhi.append(nodes[s + 1])
    sub_k = np.asarray(sub_k, dtype=np.intp)
    sub_lo = np.asarray(sub_lo, dtype=float)
    sub_hi = np.asarray(sub_hi, dtype=float)
    sub_nlo = np.asarray(sub_nlo, dtype=np.intp)
    sub_nhi = np.asarray(sub_nhi, dtype=np.intp)

    if len(sub_k):
        theta = cstart[sub_k] + 0.5 * (sub_lo + sub_hi)
        midpts = c[sub_k] + r * np.stack([np.cos(theta), np.sin(theta)], 1)
        near, _ = cloud.kdtree.query(midpts)
        kept = near < r
        idx = np.flatnonzero(kept)
        if len(idx):
            tol = r * (1.0 - _ON_BOUNDARY)
            d = dil.arcset.min_distance(midpts[idx], stop_below=tol)
            kept[idx] = d >= tol
        sub = np.flatnonzero(kept)
    else:
        sub = np.zeros(0, dtype=np.intp)

    sk = sub_k[sub]
    lo, hi = sub_lo[sub], sub_hi[sub]
    w = hi - lo
    # traversal runs clockwise: from the high parameter end to the low one
    p_from = c[sk] + r * np.stack([np.cos(cstart[sk] + hi), np.sin(cstart[sk] + hi)], 1)
    p_to = c[sk] + r * np.stack([np.cos(cstart[sk] + lo), np.sin(cstart[sk] + lo)], 1)
    # snap endpoints that are sample points to their exact coordinates
    nf, nt = sub_nhi[sub], sub_nlo[sub]
    p_from[nf < n] = P[nf[nf < n]]
    p_to[nt < n] = P[nt[nt < n]]
    area = float(np.sum(0.5 * (p_from[:, 0] * p_to[:, 1] - p_to[:, 0] * p_from[:, 1]))
                 - np.sum(_segment_area(r, w)))
    area = max(area, 0.0)

    cycles = _assemble_cycles(n, len(extra_nodes), sk, lo, hi, nf, nt, c, cstart, r, bverts)

    lone = [cy.vertices[0] for cy in cycles if cy.is_singleton]
    bx = np.concatenate([c[sk, 0], P[lone, 0]])
    by = np.concatenate([c[sk, 1], P[lone, 1]])
    brad = np.concatenate([np.full(len(sk), r), np.zeros(len(lone))])
    bstart = np.concatenate([np.mod(cstart[sk] + lo, TWO_PI), np.zeros(len(lone))])
    bspan = np.concatenate([w, np.full(len(lone), TWO_PI)])
    boundary = ArcSet(bx, by, brad, bstart, bspan)
    return RConvexHull(r, cloud, cycles, area, bverts, dil, boundary)


def _assemble_cycles(n, n_extra, sk, lo, hi, nf, nt, c, cstart, r, bverts):
    total = n + n_extra
    narcs = len(sk)
    cycles = []
    touched = np.zeros(total, dtype=bool)
    if narcs:
        g = coo_matrix((np.ones(narcs), (nf, nt)), shape=(total, total))
        ncomp, label = connected_components(g, directed=False)
        touched[nf] = True
        touched[nt] = True
        arc_comp = label[nf]
        outgoing = {}
        for k in range(narcs):
            outgoing.setdefault(int(nf[k]), []).append(k)
        for comp in np.unique(arc_comp):
            arcs = np.flatnonzero(arc_comp == comp)
            chain = _euler_chain(arcs, nf, nt, outgoing)
            pieces = tuple(
                ArcSegment(tuple(c[sk[k]]), r, float((cstart[sk[k]] + hi[k]) % TWO_PI),
                           float((cstart[sk[k]] + lo[k]) % TWO_PI), False)
                for k in chain)
            verts = sorted({int(v) for k in arcs for v in (nf[k], nt[k]) if v < n})
            cycles.append(Cycle(pieces, tuple(verts)))
    for v in bverts:
        if not touched[v]:
            cycles.append(Cycle((), (int(v),)))
    return cycles


def _euler_chain(arcs, nf, nt, outgoing):
    """Order a component's directed arcs into one closed walk (Hierholzer).

    Falls back to the input order if the arcs do not form a closed walk."""
    used = set()
    arcset = set(int(k) for k in arcs)
    start = int(arcs[0])
    stack = [start]
    used.add(start)
    path = []
    ptr = {}
    while stack:
        k = stack[-1]
        v = int(nt[k])
        lst = outgoing.get(v, [])
        i = ptr.get(v, 0)
        while i < len(lst) and (lst[i] in used or lst[i] not in arcset):
            i += 1
        ptr[v] = i
        if i < len(lst):
            used.add(lst[i])
            stack.append(lst[i])
        else:
            path.append(stack.pop())
    path.reverse()
    if len(path) != len(arcset):
        return [int(k) for k in arcs]
    return path


# module-level operations mirroring the methods

def contains(hull: RConvexHull, x):
    return hull.contains(x)


def area(hull: RConvexHull) -> float:
    return hull.area


def cycle_count(hull: RConvexHull) -> int:
    return hull.cycle_count


def boundary_vertex_count(hull: RConvexHull) -> int:
    return hull.vertex_count


def distance_to_boundary(hull: RConvexHull, x):
    return hull.distance_to_boundary(x)


def rasterize(hull: RConvexHull, box, resolution) -> MembershipGrid:
    return hull.rasterize(box, resolution)
