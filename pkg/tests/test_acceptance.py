"""Acceptance criteria, one PASS/FAIL line each.

The ring study behind AC1-AC3 runs once per session (200 replicates per
cell, about seven minutes on one core). Lines are repeated in the terminal
summary under "acceptance criteria".
"""

import math
import os

import numpy as np
import pytest

from conftest import cloud_of, report
from oracles import (brute_hull_vertices, grid_max_spacing, grid_membership_oracle,
                     hausdorff_double_loop, prim_mst_weight)
from rhull.geometry import convex_hull_indices
from rhull.metrics import hausdorff_points
from rhull.rconvex import build_rconvex_hull, grid_centers
from rhull.selector import SelectorConfig, select_mm, select_rs
from rhull.simulation import (StudyConfig, convergence_probe, make_model, read_records,
                              replay, run_study, sample_uniform)
from rhull.spacing import gumbel_quantile, maximal_spacing
from rhull.spacing import test_uniformity as uniformity

pytestmark = pytest.mark.slow

UNIT = (0.0, 1.0, 0.0, 1.0)
ALPHAS = (1e-2, 1e-3)


def canon(rows):
    return [[repr(r[k]) for k in sorted(r)] for r in rows]


@pytest.fixture(scope="module")
def ring_study(tmp_path_factory):
    out = tmp_path_factory.mktemp("ring_study")
    cfg = StudyConfig(models=("ring",), sample_sizes=(500, 1500), alphas=ALPHAS,
                      replicates=200, seed=0)
    res = run_study(cfg, out_dir=out, workers=os.cpu_count() or 1)
    assert not res.failures
    return res, out


def test_ac1_mean_r_hat(ring_study):
    res, _ = ring_study
    lines = []
    ok = True
    for n, a, want in ((1500, 1e-3, 0.1503), (500, 1e-2, 0.1509)):
        got = res.mean("r", n=n, kind="rs", alpha=a)
        ok &= abs(got - want) <= 0.010
        lines.append(f"n={n} a={a:g} mean r_hat {got:.4f} (target {want} +-0.010)")
    report("AC1", ok, "; ".join(lines))


def test_ac2_benchmark_row(ring_study):
    res, _ = ring_study
    lines = []
    ok = True
    for n, want in ((500, 0.2956), (1500, 0.1364)):
        got = 10 * res.mean("d_mu", n=n, kind="benchmark")
        ok &= abs(got - want) <= 0.10 * want
        lines.append(f"n={n} d_mu x10 {got:.4f} (target {want} +-10%)")
    report("AC2", ok, "; ".join(lines))


def test_ac3_rs_row(ring_study):
    res, _ = ring_study
    got = 10 * res.mean("d_mu", n=1500, kind="rs", alpha=1e-2)
    report("AC3", abs(got - 0.1492) <= 0.15 * 0.1492,
           f"n=1500 a=0.01 RS d_mu x10 {got:.4f} (target 0.1492 +-15%)")


def test_ac4_convergence_slope():
    res = convergence_probe("ring", (250, 500, 1000, 2000), 100, hausdorff=False)
    means = ", ".join(f"{m:.5f}" for m in res.mean_d_mu)
    report("AC4", res.ok, f"slope {res.slope:.3f} in [-0.90, -0.45]; mean d_mu {means}")


def test_ac5_level_under_null():
    m = make_model("square")
    reps, alpha = 500, 0.1
    rejects = sum(uniformity(sample_uniform(m, 500, 5, k), math.inf, alpha).reject
                  for k in range(reps))
    rate = rejects / reps
    se = math.sqrt(alpha * (1 - alpha) / reps)
    report("AC5", abs(rate - alpha) <= 3 * se,
           f"rejection rate {rate:.3f} over {reps} square samples (0.1 +- {3 * se:.3f})")


def test_ac6_oracle_suite(ring_hull):
    checks = []

    lo, hi = ring_hull.source.points.min(0), ring_hull.source.points.max(0)
    box = (lo[0], hi[0], lo[1], hi[1])
    pts, _ = grid_centers(box, 334)
    want = grid_membership_oracle(ring_hull.source.points, ring_hull.r, pts, box)
    agree = float(np.mean(ring_hull.contains(pts) == want))
    checks.append((agree >= 0.995, f"membership {agree:.4f}"))

    rng = np.random.default_rng(60)
    hull_ok = mst_ok = haus_ok = True
    for k in range(5):
        c = cloud_of(rng.random((60 + 20 * k, 2)))
        hull_ok &= set(convex_hull_indices(c).tolist()) == brute_hull_vertices(c.points)
        total, longest = prim_mst_weight(c.points)
        mst_ok &= math.isclose(select_mm(c), longest, rel_tol=1e-12)
        a, b = rng.random((150, 2)), rng.random((120, 2)) * 1.2
        haus_ok &= hausdorff_points(a, b) == hausdorff_double_loop(a, b)
    checks += [(hull_ok, "convex hull exact"), (mst_ok, "MST exact"),
               (haus_ok, "Hausdorff exact")]

    c = cloud_of(np.random.default_rng(4).random((150, 2)))
    h = build_rconvex_hull(c, 0.3)
    got = maximal_spacing(c, h).delta_hat
    lo, hi = c.points.min(0), c.points.max(0)
    ref, _ = grid_max_spacing(c.points, h.contains, h.distance_to_boundary,
                              (lo[0], hi[0], lo[1], hi[1]), 500)
    checks.append((abs(got - ref) <= 0.02 * ref, f"spacing rel err {abs(got - ref) / ref:.2e}"))

    worst = max(abs(1 - math.exp(-math.exp(-gumbel_quantile(a))) - a)
                for a in np.geomspace(1e-6, 0.9, 40))
    checks.append((worst <= 1e-12, f"Gumbel round trip {worst:.1e}"))

    report("AC6", all(ok for ok, _ in checks), "; ".join(d for _, d in checks))


def bracket_ok(trace):
    if trace.outcome != "bisection":
        lo, hi = trace.bracket
        return lo <= trace.r_hat <= hi
    it = trace.iterations
    lo, hi = it[1].r, it[0].r
    if it[1].verdict.reject or not it[0].verdict.reject:
        return False
    for step in it[2:]:
        if not (lo < step.r < hi):
            return False
        if step.verdict.reject:
            hi = step.r
        else:
            lo = step.r
    return (lo, hi) == trace.bracket and trace.r_hat == lo


def test_ac7_structural(ring_study, ring1500):
    res, out = ring_study
    checks = []

    radii = (0.02, 0.05, 0.1, 0.15, 0.3, 1.0, math.inf)
    masks = [build_rconvex_hull(ring1500, r).rasterize(UNIT, 334).mask for r in radii]
    bad = sum(int(np.sum(a & ~b)) for a, b in zip(masks, masks[1:]))
    checks.append((bad == 0, f"nesting violations {bad}"))

    contained = all(build_rconvex_hull(ring1500, r).contains(ring1500.points).all()
                    for r in radii)
    checks.append((contained, "samples contained"))

    traces = []
    for name, n in (("ring", 500), ("cshape", 300), ("sshape", 500), ("square", 300)):
        for k in range(3):
            traces.append(select_rs(sample_uniform(make_model(name), n, 70, k),
                                    SelectorConfig(max_iterations=10)))
    good = sum(bracket_ok(t) for t in traces)
    checks.append((good == len(traces), f"bracket invariant {good}/{len(traces)} traces"))

    stored = read_records(os.path.join(out, "cells", "ring_n1500.csv"))
    same = all(canon(replay(res.config, "ring", 1500, k))
               == canon([r for r in stored if r["replicate"] == k]) for k in (0, 117, 199))
    checks.append((same, "cell replay bit-identical"))

    report("AC7", all(ok for ok, _ in checks), "; ".join(d for _, d in checks))


@pytest.mark.xfail(strict=True, reason="a finite radius rounds off convex corners")
def test_ac7_convex_limit_at_diameter(ring1500):
    a = build_rconvex_hull(ring1500, ring1500.diameter).rasterize(UNIT, 334).mask
    b = build_rconvex_hull(ring1500, math.inf).rasterize(UNIT, 334).mask
    diff = int(np.sum(a != b))
    report("AC7 convex limit", diff == 0,
           f"hull at r=diameter vs convex hull differ in {diff} grid cells")


def test_pattern_rs_from_above(ring_study):
    res, _ = ring_study
    a = 1e-3
    m500, m1500 = (res.mean("r", n=n, kind="rs", alpha=a) for n in (500, 1500))
    se = res.stderr("r", n=1500, kind="rs", alpha=a)
    report("pattern RS", m500 > m1500 >= 0.15 - 2 * se,
           f"a=0.001 mean r_hat {m500:.4f} -> {m1500:.4f}, r0 0.15")


def test_pattern_benchmark_floor(ring_study):
    res, _ = ring_study
    ok, parts = True, []
    for n in (500, 1500):
        bench = res.mean("d_mu", n=n, kind="benchmark")
        best = min(res.mean("d_mu", n=n, kind="rs", alpha=a) for a in ALPHAS)
        se = res.stderr("d_mu", n=n, kind="benchmark")
        ok &= bench <= best + se
        parts.append(f"n={n} benchmark {10 * bench:.4f} <= RS {10 * best:.4f}")
    report("pattern floor", ok, "; ".join(parts))


def test_pattern_mm_decreasing(ring_study):
    res, _ = ring_study
    m = [res.mean("r", n=n, kind="mm") for n in (500, 1500)]
    report("pattern MM", m[0] > m[1], f"mean MM {m[0]:.4f} -> {m[1]:.4f}")
