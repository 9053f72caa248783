"""Data-driven r-convex hull estimation of planar supports."""

from .errors import RHullError
from .geometry import PointCloud
from .rconvex import RConvexHull, build_rconvex_hull
from .selector import SelectorConfig, estimate_support, select_mm, select_rs
from .spacing import test_uniformity

__version__ = "0.1.0"

__all__ = [
    "PointCloud", "RConvexHull", "RHullError", "SelectorConfig", "build_rconvex_hull",
    "estimate_support", "select_mm", "select_rs", "test_uniformity",
]
