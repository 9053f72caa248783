"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when
``RHULL_PURE_PYTHON=1`` is set, the numpy implementation takes over.
"""

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("RHULL_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend forced")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"


class ArcSet:
    """Circular arcs stored counterclockwise as (center, radius, start, span).

    Zero-radius entries stand for isolated points. Arrays are kept sorted by
    center abscissa, which both kernels rely on for pruning.
    """

    def __init__(self, cx, cy, rad, start, span):
        cx = np.asarray(cx, dtype=float)
        order = np.argsort(cx, kind="stable")
        self.cx = np.ascontiguousarray(cx[order])
        self.cy = np.ascontiguousarray(np.asarray(cy, dtype=float)[order])
        self.rad = np.ascontiguousarray(np.asarray(rad, dtype=float)[order])
        self.start = np.ascontiguousarray(np.asarray(start, dtype=float)[order])
        self.span = np.ascontiguousarray(np.asarray(span, dtype=float)[order])
        self.order = order
        end = self.start + self.span
        self.e0x = self.cx + self.rad * np.cos(self.start)
        self.e0y = self.cy + self.rad * np.sin(self.start)
        self.e1x = self.cx + self.rad * np.cos(end)
        self.e1y = self.cy + self.rad * np.sin(end)
        self.rmax = float(self.rad.max()) if len(self.rad) else 0.0

    def __len__(self):
        return len(self.cx)

    def min_distance(self, q, stop_below=np.inf, backend=None):
        q = np.asarray(q, dtype=float).reshape(-1, 2)
        impl = BACKENDS[backend or BACKEND]
        return impl.arc_min_distance(
            np.ascontiguousarray(q[:, 0]), np.ascontiguousarray(q[:, 1]),
            self.cx, self.cy, self.rad, self.start, self.span,
            self.e0x, self.e0y, self.e1x, self.e1y,
            self.rmax, float(stop_below))
