# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled arc-distance kernel; see ``_kernels_py`` for the reference version."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, fabs, fmod, sqrt, INFINITY, M_PI

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


cdef inline double _arc_dist(double qx, double qy, Py_ssize_t k,
                             const double[::1] cx, const double[::1] cy,
                             const double[::1] rad, const double[::1] start,
                             const double[::1] span,
                             const double[::1] e0x, const double[::1] e0y,
                             const double[::1] e1x, const double[::1] e1y) nogil:
    cdef double vx = qx - cx[k]
    cdef double vy = qy - cy[k]
    cdef double d = sqrt(vx * vx + vy * vy)
    cdef double rel, a, b
    if span[k] >= TWO_PI or d == 0.0:
        return fabs(d - rad[k])
    rel = fmod(atan2(vy, vx) - start[k], TWO_PI)
    if rel < 0.0:
        rel += TWO_PI
    if rel <= span[k]:
        return fabs(d - rad[k])
    a = (qx - e0x[k]) * (qx - e0x[k]) + (qy - e0y[k]) * (qy - e0y[k])
    b = (qx - e1x[k]) * (qx - e1x[k]) + (qy - e1y[k]) * (qy - e1y[k])
    return sqrt(a if a < b else b)


def arc_min_distance(const double[::1] qx, const double[::1] qy,
                     const double[::1] cx, const double[::1] cy,
                     const double[::1] rad, const double[::1] start,
                     const double[::1] span,
                     const double[::1] e0x, const double[::1] e0y,
                     const double[::1] e1x, const double[::1] e1y,
                     double rmax, double stop_below):
    cdef Py_ssize_t m = qx.shape[0]
    cdef Py_ssize_t na = cx.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t q, lo, hi, mid, left, right, k
    cdef double x, y, best, gl, gr, d, bound
    # an infinite threshold asks for the exact minimum: never stop early
    cdef double stop = stop_below if stop_below < INFINITY else -1.0
    with nogil:
        for q in range(m):
            x = qx[q]
            y = qy[q]
            best = INFINITY
            bound = stop_below
            lo = 0
            hi = na
            while lo < hi:
                mid = (lo + hi) // 2
                if cx[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            left = lo - 1
            right = lo
            while left >= 0 or right < na:
                gl = x - cx[left] if left >= 0 else INFINITY
                gr = cx[right] - x if right < na else INFINITY
                if gl <= gr:
                    if gl - rmax >= bound:
                        break
                    k = left
                    left -= 1
                else:
                    if gr - rmax >= bound:
                        break
                    k = right
                    right += 1
                d = _arc_dist(x, y, k, cx, cy, rad, start, span, e0x, e0y, e1x, e1y)
                if d < best:
                    best = d
                    if best < stop:
                        break
                    if best < bound:
                        bound = best
            out[q] = best
    return out_arr
