"""Data-driven choice of the hull radius.

``select_rs`` bisects between a radius where the uniformity test accepts and
one where it rejects, returning the largest accepted radius found.
``select_mm`` is the minimum-spanning-tree baseline.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateRegion, DegenerateSampleSize, InvalidConfig
from .geometry import PointCloud, _check_cloud, euclidean_mst
from .rconvex import RConvexHull, build_rconvex_hull
from .spacing import DEFAULT_STEP, UniformityVerdict, test_uniformity

BISECTION = "bisection"
CONVEX_FALLBACK = "convex_hull_fallback"
CYCLE_FALLBACK = "cycle_cap_fallback"


@dataclass(frozen=True)
class SelectorConfig:
    """Selector settings. ``r_min``/``r_max`` of ``None`` are derived from the
    cloud: half the median nearest-neighbour distance and the diameter."""

    alpha: float = 1e-2
    max_iterations: int = 20
    max_cycles: int = 4
    r_min: float | None = None
    r_max: float | None = None
    nu: float = 0.95
    angular_step: float = DEFAULT_STEP
    seed: int = 0

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise InvalidConfig("; ".join(problems))

    def problems(self):
        out = []
        if not (0.0 < self.alpha < 1.0):
            out.append(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (0.0 < self.nu < 1.0):
            out.append(f"nu must lie in (0, 1), got {self.nu}")
        if int(self.max_iterations) < 1:
            out.append(f"max_iterations must be >= 1, got {self.max_iterations}")
        if int(self.max_cycles) < 1:
            out.append(f"max_cycles must be >= 1, got {self.max_cycles}")
        if not self.angular_step > 0:
            out.append(f"angular_step must be positive, got {self.angular_step}")
        for name in ("r_min", "r_max"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                out.append(f"{name} must be positive and finite, got {v}")
        if self.r_min is not None and self.r_max is not None and not self.r_min < self.r_max:
            out.append(f"r_min ({self.r_min}) must be below r_max ({self.r_max})")
        return out

    def bracket(self, cloud: PointCloud):
        lo = self.r_min if self.r_min is not None else default_r_min(cloud)
        hi = self.r_max if self.r_max is not None else cloud.diameter
        if not 0 < lo < hi:
            raise InvalidConfig(f"invalid bracket [{lo}, {hi}]")
        return float(lo), float(hi)


def default_r_min(cloud: PointCloud) -> float:
    d, _ = cloud.kdtree.query(cloud.points, k=2)
    return 0.5 * float(np.median(d[:, 1]))


@dataclass(frozen=True)
class Iteration:
    r: float
    verdict: UniformityVerdict
    cycle_count: int
    degenerate: bool = False


@dataclass
class SelectorTrace:
    iterations: list = field(default_factory=list)
    outcome: str = BISECTION
    r_hat: float = math.nan
    cycle_probes: list = field(default_factory=list)
    bracket: tuple = (math.nan, math.nan)
    config: SelectorConfig | None = None

    def to_dict(self):
        return {
            "outcome": self.outcome,
            "r_hat": self.r_hat,
            "bracket": list(self.bracket),
            "cycle_probes": [list(p) for p in self.cycle_probes],
            "iterations": [
                dict(r=it.r, cycle_count=it.cycle_count, degenerate=it.degenerate,
                     **{k: v for k, v in it.verdict.to_dict().items() if k != "r"})
                for it in self.iterations
            ],
            "config": asdict(self.config) if self.config is not None else None,
        }


def _run_test(cloud, r, cfg, test, trace):
    hull = build_rconvex_hull(cloud, r)
    try:
        verdict = test(cloud, r, cfg.alpha, cfg.angular_step, hull)
        degenerate = False
    except (DegenerateSampleSize, DegenerateRegion):
        # too few interior points or no area: nothing to reject with
        verdict = UniformityVerdict(False, 0.0, math.nan, 0, None, None, float(r))
        degenerate = True
    trace.iterations.append(Iteration(float(r), verdict, hull.cycle_count, degenerate))
    return verdict


def _default_test(cloud, r, alpha, angular_step, hull):
    return test_uniformity(cloud, r, alpha, angular_step, hull=hull)


def select_rs(cloud: PointCloud, cfg: SelectorConfig | None = None, test=None) -> SelectorTrace:
    """Bisection search for the largest radius at which uniformity is accepted.

    ``test(cloud, r, alpha, angular_step, hull)`` may replace the uniformity
    test; it must return a :class:`UniformityVerdict`.
    """
    cfg = cfg or SelectorConfig()
    test = test or _default_test
    _check_cloud(cloud)
    lo, hi = cfg.bracket(cloud)
    trace = SelectorTrace(config=cfg)

    if not _run_test(cloud, hi, cfg, test, trace).reject:
        trace.outcome, trace.r_hat, trace.bracket = CONVEX_FALLBACK, hi, (lo, hi)
        return trace

    cycles = build_rconvex_hull(cloud, lo).cycle_count
    while cycles > cfg.max_cycles and 2.0 * lo < hi:
        trace.cycle_probes.append((lo, cycles))
        lo *= 2.0
        cycles = build_rconvex_hull(cloud, lo).cycle_count
    trace.cycle_probes.append((lo, cycles))

    if _run_test(cloud, lo, cfg, test, trace).reject:
        trace.outcome, trace.r_hat, trace.bracket = CYCLE_FALLBACK, lo, (lo, hi)
        return trace

    for _ in range(int(cfg.max_iterations)):
        mid = 0.5 * (lo + hi)
        if _run_test(cloud, mid, cfg, test, trace).reject:
            hi = mid
        else:
            lo = mid
    trace.outcome, trace.r_hat, trace.bracket = BISECTION, lo, (lo, hi)
    return trace


def select_mm(cloud: PointCloud) -> float:
    """Longest edge of the Euclidean minimum spanning tree."""
    _, w = euclidean_mst(cloud)
    return float(w.max())


def estimate_support(cloud: PointCloud, cfg: SelectorConfig | None = None,
                     trace: SelectorTrace | None = None) -> RConvexHull:
    """Hull at ``nu * r_hat``; the convex hull when the test never rejects.

    Pass a finished ``trace`` to skip the search."""
    cfg = cfg or SelectorConfig()
    if trace is None:
        trace = select_rs(cloud, cfg)
    if trace.outcome == CONVEX_FALLBACK:
        return build_rconvex_hull(cloud, math.inf)
    return build_rconvex_hull(cloud, cfg.nu * trace.r_hat)
