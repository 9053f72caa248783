"""Pure numpy implementation of the arc-distance kernel.

Same contract as the compiled version. With ``stop_below = inf`` every
query gets its exact minimum distance to the arc set. Otherwise the result
only decides the comparison: a value below ``stop_below`` iff some arc is
closer than that.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def _arc_dist(qx, qy, k, cx, cy, rad, start, span, e0x, e0y, e1x, e1y):
    vx = qx - cx[k]
    vy = qy - cy[k]
    d = np.hypot(vx, vy)
    radial = np.abs(d - rad[k])
    if span[k] >= TWO_PI:
        return radial
    rel = np.mod(np.arctan2(vy, vx) - start[k], TWO_PI)
    ends = np.minimum((qx - e0x[k]) ** 2 + (qy - e0y[k]) ** 2,
                      (qx - e1x[k]) ** 2 + (qy - e1y[k]) ** 2)
    return np.where((rel <= span[k]) | (d == 0.0), radial, np.sqrt(ends))


def arc_min_distance(qx, qy, cx, cy, rad, start, span, e0x, e0y, e1x, e1y,
                     rmax, stop_below):
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    best = np.full(len(qx), np.inf)
    if len(cx) == 0 or len(qx) == 0:
        return best
    order = np.argsort(qx, kind="stable")
    sx, sy = qx[order], qy[order]
    sbest = best[order]
    bounded = np.isfinite(stop_below)
    for k in range(len(cx)):
        if bounded:
            reach = stop_below + rad[k]
            lo = np.searchsorted(sx, cx[k] - reach, side="left")
            hi = np.searchsorted(sx, cx[k] + reach, side="right")
        else:
            lo, hi = 0, len(sx)
        if lo >= hi:
            continue
        d = _arc_dist(sx[lo:hi], sy[lo:hi], k, cx, cy, rad, start, span,
                      e0x, e0y, e1x, e1y)
        np.minimum(sbest[lo:hi], d, out=sbest[lo:hi])
    best[order] = sbest
    return best
