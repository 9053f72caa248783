"""Orientation and in-circle predicates with exact fallback.

Each predicate is evaluated in double precision first and accepted when its
magnitude clears Shewchuk's static error bound. Undecided cases are redone
in rational arithmetic on the exact binary values of the inputs, so the
returned sign is always exact.
"""

from fractions import Fraction

import numpy as np

_EPS = 2.0 ** -53
CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS


def _sign(v):
    return (v > 0) - (v < 0)


def orient2d_exact(a, b, c):
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle_exact(a, b, c, d):
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def orient2d(a, b, c):
    """Sign of the signed area of triangle abc: +1 for counterclockwise."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > CCW_ERRBOUND * (abs(detleft) + abs(detright)):
        return 1 if det > 0 else -1
    return orient2d_exact(a, b, c)


def incircle(a, b, c, d):
    """+1 if d lies inside the circle through counterclockwise a, b, c."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    bc = bdx * cdy - cdx * bdy
    ca = cdx * ady - adx * cdy
    ab = adx * bdy - bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * bc + blift * ca + clift * ab
    perm = ((abs(bdx * cdy) + abs(cdx * bdy)) * alift
            + (abs(cdx * ady) + abs(adx * cdy)) * blift
            + (abs(adx * bdy) + abs(bdx * ady)) * clift)
    if abs(det) > ICC_ERRBOUND * perm:
        return 1 if det > 0 else -1
    return incircle_exact(a, b, c, d)


def orient2d_many(a, b, c):
    """Vectorised orient2d over rows of (m, 2) arrays; returns int8 signs."""
    detleft = (a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1])
    detright = (a[:, 1] - c[:, 1]) * (b[:, 0] - c[:, 0])
    det = detleft - detright
    sure = np.abs(det) > CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    out = np.sign(det).astype(np.int8)
    for k in np.flatnonzero(~sure):
        out[k] = orient2d_exact(a[k], b[k], c[k])
    return out


def incircle_many(a, b, c, d):
    """Vectorised incircle over rows of (m, 2) arrays; returns int8 signs."""
    adx, ady = a[:, 0] - d[:, 0], a[:, 1] - d[:, 1]
    bdx, bdy = b[:, 0] - d[:, 0], b[:, 1] - d[:, 1]
    cdx, cdy = c[:, 0] - d[:, 0], c[:, 1] - d[:, 1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    perm = ((np.abs(bdx * cdy) + np.abs(cdx * bdy)) * alift
            + (np.abs(cdx * ady) + np.abs(adx * cdy)) * blift
            + (np.abs(adx * bdy) + np.abs(bdx * ady)) * clift)
    sure = np.abs(det) > ICC_ERRBOUND * perm
    out = np.sign(det).astype(np.int8)
    for k in np.flatnonzero(~sure):
        out[k] = incircle_exact(a[k], b[k], c[k], d[k])
    return out
