"""Maximal spacings and the extreme-value uniformity test on r-convex hulls.

The test measures the largest empty disc that fits in ``C_r``. Candidate
centres are points at distance exactly ``rho`` from the sample (the boundary
of the union of rho-discs); the largest clearance among those lying in the
hull is compared with the critical radius derived from a Gumbel quantile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import AlphaOutOfRange, DegenerateRegion, DegenerateSampleSize, InvalidRadius
from .geometry import PointCloud, delaunay
from .rconvex import RConvexHull, build_rconvex_hull, dilation_arcs, dilation_boundary

DEFAULT_STEP = 2.0 * math.pi / 256

__all__ = [
    "CriticalValue", "UniformityVerdict", "SpacingReport", "gumbel_quantile",
    "critical_value", "dilation_boundary", "candidate_set", "max_clearance",
    "test_uniformity", "maximal_spacing",
]


def gumbel_quantile(alpha: float) -> float:
    """Upper ``alpha`` quantile of the standard Gumbel law."""
    if not (0.0 < alpha < 1.0):
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    return -math.log(-math.log1p(-alpha))


@dataclass(frozen=True)
class CriticalValue:
    alpha: float
    n: int
    v_n: int
    a_n: float
    u_alpha: float
    c_star_volume: float
    c_star_radius: float
    d: int = 2
    beta: float = 1.0


def critical_value(n: int, v_n: int, a_n: float, alpha: float) -> CriticalValue:
    """Critical empty-disc volume for ``n`` points, ``v_n`` of them on the
    boundary of a region of area ``a_n``; also returned as a disc radius."""
    u = gumbel_quantile(alpha)
    m = int(n) - int(v_n)
    if m < 3:
        raise DegenerateSampleSize(f"n - v_n = {m} < 3")
    if not a_n > 0:
        raise DegenerateRegion(f"region area must be positive, got {a_n}")
    lm = math.log(m)
    vol = a_n * (u + lm + math.log(lm)) / m
    if not vol > 0:
        raise DegenerateSampleSize(f"critical volume {vol} is not positive")
    return CriticalValue(alpha, int(n), int(v_n), float(a_n), u, vol, math.sqrt(vol / math.pi))


@dataclass(frozen=True)
class UniformityVerdict:
    reject: bool
    M_r: float
    critical_radius: float
    candidate_count: int
    witness: tuple | None = None
    critical: CriticalValue | None = field(default=None, compare=False)
    r: float = math.nan

    def to_dict(self):
        out = {
            "r": self.r,
            "reject": self.reject,
            "M_r": self.M_r,
            "critical_radius": self.critical_radius,
            "candidate_count": self.candidate_count,
            "witness": list(self.witness) if self.witness is not None else None,
        }
        if self.critical is not None:
            c = self.critical
            out.update(alpha=c.alpha, n=c.n, v_n=c.v_n, a_n=c.a_n, u_alpha=c.u_alpha,
                       c_star_volume=c.c_star_volume)
        return out


def _arc_samples(owner, start, span, points, rho, step):
    """Angles ``k * step`` that fall inside each arc, plus the arc ends."""
    pieces_o, pieces_t = [], []
    k_lo = np.ceil(start / step).astype(np.int64)
    k_hi = np.floor((start + span) / step).astype(np.int64)
    full = span >= 2.0 * math.pi
    k_hi[full] = k_lo[full] + math.ceil(2.0 * math.pi / step - 1e-9) - 1
    counts = np.maximum(k_hi - k_lo + 1, 0)
    rep = np.repeat(np.arange(len(owner)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    pieces_o.append(rep)
    pieces_t.append((k_lo[rep] + offs) * step)
    partial = np.flatnonzero(~full)
    pieces_o += [partial, partial]
    pieces_t += [start[partial], start[partial] + span[partial]]
    arc = np.concatenate(pieces_o)
    theta = np.concatenate(pieces_t)
    c = points[owner[arc]]
    xy = c + rho * np.stack([np.cos(theta), np.sin(theta)], 1)
    return xy, arc, theta


def candidate_set(hull: RConvexHull, cloud: PointCloud, rho: float,
                  angular_step: float = DEFAULT_STEP) -> np.ndarray:
    """Points of the rho-dilation boundary, sampled every ``angular_step``
    radians around each sample point, that lie in the hull."""
    if not rho > 0:
        raise InvalidRadius(f"rho must be positive, got {rho}")
    if not angular_step > 0:
        raise ValueError("angular_step must be positive")
    # a point at distance rho from the sample is outside any hull with r <= rho
    if hull.r <= rho:
        return np.zeros((0, 2))
    dil = dilation_arcs(cloud, rho)
    xy, _, _ = _arc_samples(dil.owner, dil.start, dil.span, cloud.points, rho, angular_step)
    return xy[hull.contains(xy)] if len(xy) else xy


def max_clearance(hull: RConvexHull, candidates) -> tuple:
    """Largest distance to the hull boundary over candidates inside the hull.

    Returns ``(0.0, None)`` when no candidate lies inside. Ties go to the
    first candidate."""
    q = np.asarray(candidates, dtype=float).reshape(-1, 2)
    if len(q) == 0:
        return 0.0, None
    inside = np.flatnonzero(hull.contains(q))
    if len(inside) == 0:
        return 0.0, None
    d = hull.distance_to_boundary(q[inside])
    k = int(np.argmax(d))
    return float(d[k]), tuple(float(v) for v in q[inside[k]])


def test_uniformity(cloud: PointCloud, r: float, alpha: float,
                    angular_step: float = DEFAULT_STEP,
                    hull: RConvexHull | None = None) -> UniformityVerdict:
    """Test uniformity of the sample on ``C_r`` through its largest empty disc.

    Rejects iff the largest clearance found exceeds the critical radius.
    """
    if not (0.0 < alpha < 1.0):
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    if not angular_step > 0:
        raise ValueError("angular_step must be positive")
    if hull is None:
        hull = build_rconvex_hull(cloud, r)
    cv = critical_value(cloud.n, hull.vertex_count, hull.area, alpha)
    rho = cv.c_star_radius
    count = 0
    best, witness = 0.0, None
    if hull.r > rho:
        dil = dilation_arcs(cloud, rho)
        xy, arc, theta = _arc_samples(dil.owner, dil.start, dil.span, cloud.points,
                                      rho, angular_step)
        keep = hull.contains(xy) if len(xy) else np.zeros(0, dtype=bool)
        xy, arc, theta = xy[keep], arc[keep], theta[keep]
        count = len(xy)
        if count:
            d = hull.distance_to_boundary(xy)
            k = int(np.argmax(d))
            best, witness = float(d[k]), tuple(float(v) for v in xy[k])
            # one finer pass around the maximiser, clipped to its arc
            a = arc[k]
            fine = theta[k] + angular_step / 4.0 * np.arange(-3, 4)
            lo, hi = dil.start[a], dil.start[a] + dil.span[a]
            rel = np.mod(fine - lo, 2.0 * math.pi)
            fine = fine[(rel <= hi - lo) & (fine != theta[k])]
            if len(fine):
                p = cloud.points[dil.owner[a]]
                fxy = p + rho * np.stack([np.cos(fine), np.sin(fine)], 1)
                fxy = fxy[hull.contains(fxy)]
                if len(fxy):
                    fd = hull.distance_to_boundary(fxy)
                    j = int(np.argmax(fd))
                    count += len(fxy)
                    if fd[j] > best:
                        best, witness = float(fd[j]), tuple(float(v) for v in fxy[j])
    reject = best > rho
    return UniformityVerdict(bool(reject), best, rho, count,
                             witness if reject else None, cv, float(hull.r))


# keep pytest from collecting the public function as a test
test_uniformity.__test__ = False


@dataclass(frozen=True)
class SpacingReport:
    delta_hat: float
    center: tuple
    volume: float


def _clearance(hull, cloud, x):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    ds, _ = cloud.kdtree.query(x)
    inside = hull.contains(x)
    out = np.zeros(len(x))
    if np.any(inside):
        db = hull.distance_to_boundary(x[inside])
        out[inside] = np.minimum(ds[inside], db)
    return out


def maximal_spacing(cloud: PointCloud, hull: RConvexHull, refine: int = 12) -> SpacingReport:
    """Largest disc inside the hull that contains no sample point.

    Candidates are Voronoi vertices, points of the hull boundary and a coarse
    grid; the best few are polished with a derivative-free local search."""
    if not hull.area > 0:
        raise DegenerateRegion("hull has zero area")
    P = cloud.points
    tri = delaunay(cloud).triangles
    a, b, c = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    bx, by = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    cx, cy = c[:, 0] - a[:, 0], c[:, 1] - a[:, 1]
    den = 2.0 * (bx * cy - by * cx)
    ux = (cy * (bx ** 2 + by ** 2) - by * (cx ** 2 + cy ** 2)) / den
    uy = (bx * (cx ** 2 + cy ** 2) - cx * (bx ** 2 + by ** 2)) / den
    cand = [a + np.stack([ux, uy], 1)]
    lo, hi = P.min(0), P.max(0)
    g = np.linspace(0.0, 1.0, 66)[1:-1]
    gx, gy = np.meshgrid(lo[0] + g * (hi[0] - lo[0]), lo[1] + g * (hi[1] - lo[1]))
    cand.append(np.stack([gx.ravel(), gy.ravel()], 1))
    cand = np.concatenate(cand)
    f = _clearance(hull, cloud, cand)
    top = np.argsort(-f, kind="stable")[:refine]
    best_f, best_x = float(f[top[0]]), cand[top[0]]
    scale = max(float(np.ptp(P, axis=0).max()), 1e-12)
    for k in top:
        if f[k] <= 0:
            continue
        res = minimize(lambda x: -_clearance(hull, cloud, x)[0], cand[k], method="Nelder-Mead",
                       options={"xatol": 1e-9 * scale, "fatol": 1e-12 * scale,
                                "initial_simplex": cand[k] + 0.01 * scale * np.array(
                                    [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])})
        val = float(_clearance(hull, cloud, res.x)[0])
        if val > best_f:
            best_f, best_x = val, res.x
    return SpacingReport(best_f, (float(best_x[0]), float(best_x[1])), math.pi * best_f ** 2)
