"""Compare the compiled and pure-python distance kernels.

Times the arc distance query on its own and two calls that lean on it
(rasterizing a hull and one uniformity test), once per available backend.

    python benchmarks/bench_kernels.py --n 1500 --grid 334 --repeat 3
"""

import argparse
import time

import numpy as np

from rhull import kernels
from rhull.rconvex import build_rconvex_hull, dilation_arcs
from rhull.simulation import make_model, sample_uniform
from rhull.spacing import test_uniformity


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1500)
    ap.add_argument("--r", type=float, default=0.15)
    ap.add_argument("--grid", type=int, default=334)
    ap.add_argument("--queries", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cloud = sample_uniform(make_model("ring"), args.n, args.seed)
    arcs = dilation_arcs(cloud, args.r).arcset
    q = np.random.default_rng(args.seed).random((args.queries, 2))
    print(f"ring n={cloud.n} r={args.r}: {len(arcs)} arcs, {args.queries} queries, "
          f"best of {args.repeat}")

    saved = kernels.BACKEND
    rows, ref = [], None
    try:
        for name in kernels.BACKENDS:
            kernels.BACKEND = name
            d = arcs.min_distance(q)
            if ref is None:
                ref = d
            drift = float(np.abs(d - ref).max())
            t_kernel = best_of(lambda: arcs.min_distance(q), args.repeat)
            hull = build_rconvex_hull(cloud, args.r)
            t_raster = best_of(lambda: hull.rasterize((0, 1, 0, 1), args.grid), args.repeat)
            t_test = best_of(lambda: test_uniformity(cloud, args.r, 1e-2), args.repeat)
            rows.append((name, t_kernel, t_raster, t_test, drift))
    finally:
        kernels.BACKEND = saved

    print(f"{'backend':>10}{'kernel s':>12}{'raster s':>12}{'test s':>12}{'max diff':>12}")
    for name, a, b, c, drift in rows:
        print(f"{name:>10}{a:12.4f}{b:12.4f}{c:12.4f}{drift:12.2e}")
    if len(rows) == 2:
        py = next(r for r in rows if r[0] == "python")
        cc = next(r for r in rows if r[0] == "compiled")
        print("speedup   " + "".join(f"{p / c:12.1f}" for p, c in zip(py[1:4], cc[1:4])))
    else:
        print("compiled extension not available; only the python backend ran")


if __name__ == "__main__":
    main()
