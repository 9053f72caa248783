"""Command-line front end: ``rhull <command> ...``.

Every command writes a ``manifest.json`` next to its outputs recording the
arguments, input digests, seed and version; ``rhull replay`` reruns it and
checks that the outputs come out byte-identical.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
import tempfile
import warnings
from importlib import metadata

from . import io as rio
from .errors import InvalidConfig, NumericError, RHullError, TooFewPoints, UsageError
from .metrics import DEFAULT_GRID, compare, distance_in_measure, hausdorff_sets
from .rconvex import build_rconvex_hull
from .selector import SelectorConfig, estimate_support, select_mm, select_rs
from .simulation import (MODEL_NAMES, RECORD_FIELDS, StudyConfig, _fmt, load_study_config,
                         make_model, run_study, sample_uniform)
from .spacing import test_uniformity

MIN_POINTS = 10


class ReplayMismatch(NumericError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _radius(text):
    t = text.strip().lower()
    if t in ("inf", "infinity", "convex"):
        return math.inf
    if t == "diameter":
        return t
    try:
        v = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a radius: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"radius must be positive: {text!r}")
    return v


def _unit_interval(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _selector_flags(p):
    p.add_argument("--alpha", type=_unit_interval, default=1e-2, help="significance level")
    p.add_argument("--nu", type=_unit_interval, default=0.95, help="shrink factor for the final radius")
    p.add_argument("--iters", type=_positive_int, default=20, help="bisection iterations")
    p.add_argument("--max-cycles", type=_positive_int, default=4, help="cycle cap at the lower end")
    p.add_argument("--rmin", type=float, default=None, help="lower bracket (default: half median NN distance)")
    p.add_argument("--rmax", type=float, default=None, help="upper bracket (default: sample diameter)")


def _common_flags(p, out_default="rhull-out"):
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the manifest")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--out", default=out_default, help="output directory")


def build_parser():
    parser = _Parser(prog="rhull", description="r-convex hull support estimation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="select r and build the support estimate")
    p.add_argument("input")
    _selector_flags(p)
    p.add_argument("--grid", type=_positive_int, default=None,
                   help="also write a membership grid with this many cells per axis")
    p.add_argument("--arc-samples", type=_positive_int, default=64)
    _common_flags(p)

    p = sub.add_parser("select", help="run the radius selectors only")
    p.add_argument("input")
    _selector_flags(p)
    _common_flags(p)

    p = sub.add_parser("test", help="uniformity test on the hull at a given radius")
    p.add_argument("input")
    p.add_argument("--r", type=_radius, required=True, help="radius, 'diameter' or 'inf'")
    p.add_argument("--alpha", type=_unit_interval, default=1e-2)
    _common_flags(p)

    p = sub.add_parser("study", help="Monte Carlo study from a config file")
    p.add_argument("config")
    p.add_argument("--raw", action="store_true", help="report d_mu without the x10 scaling")
    p.add_argument("--replicates", type=_positive_int, default=None, help="override the config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--grid", type=_positive_int, default=None, help="override the config grid")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--out", default="rhull-out")

    p = sub.add_parser("metrics", help="distances between two regions")
    p.add_argument("a", help="points CSV, grid file (.grid) or model:<name>")
    p.add_argument("b", help="points CSV, grid file (.grid) or model:<name>")
    p.add_argument("--r", type=_radius, default=None,
                   help="hull radius for CSV operands (default: the model's r0)")
    p.add_argument("--grid", type=_positive_int, default=DEFAULT_GRID)
    _common_flags(p)

    p = sub.add_parser("sample", help="write a seeded uniform sample of a model")
    p.add_argument("model", choices=MODEL_NAMES)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("replay", help="rerun a manifest and compare outputs")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="where to rerun (default: a temporary directory)")
    return parser


# ---------------------------------------------------------------------------


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_cloud(path):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cloud = rio.read_points(path)
    for w in caught:
        print(f"rhull: warning: {w.message}", file=sys.stderr)
    if cloud.n < MIN_POINTS:
        raise TooFewPoints(f"{path}: need at least {MIN_POINTS} points, got {cloud.n}")
    return cloud


def _selector_config(args):
    try:
        return SelectorConfig(alpha=args.alpha, max_iterations=args.iters,
                              max_cycles=args.max_cycles, r_min=args.rmin, r_max=args.rmax,
                              nu=args.nu, seed=args.seed)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None


def cmd_estimate(args, out):
    cloud = _load_cloud(args.input)
    cfg = _selector_config(args)
    trace = select_rs(cloud, cfg)
    hull = estimate_support(cloud, cfg, trace)
    summary = {
        "n": cloud.n,
        "r_hat": trace.r_hat,
        "outcome": trace.outcome,
        "r_used": hull.r,
        "nu": cfg.nu,
        "area": hull.area,
        "cycle_count": hull.cycle_count,
        "vertex_count": hull.vertex_count,
        "trace": trace.to_dict(),
    }
    files = {"estimate.json": _dump(summary),
             "boundary.csv": rio.format_boundary(hull, args.arc_samples)}
    if args.grid:
        lo, hi = cloud.points.min(0), cloud.points.max(0)
        box = (float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1]))
        files["membership.grid"] = rio.format_grid(hull.rasterize(box, args.grid))
    print(f"r_hat={trace.r_hat:.6g} outcome={trace.outcome} r_used={hull.r:.6g} "
          f"area={hull.area:.6g} cycles={hull.cycle_count} vertices={hull.vertex_count}")
    return files


def cmd_select(args, out):
    cloud = _load_cloud(args.input)
    cfg = _selector_config(args)
    trace = select_rs(cloud, cfg)
    mm = select_mm(cloud)
    record = {"rs": trace.to_dict(), "mm": mm}
    print(f"rs r_hat={trace.r_hat:.6g} ({trace.outcome}, {len(trace.iterations)} tests) mm={mm:.6g}")
    return {"selection.json": _dump(record)}


def cmd_test(args, out):
    cloud = _load_cloud(args.input)
    r = cloud.diameter if args.r == "diameter" else args.r
    verdict = test_uniformity(cloud, r, args.alpha)
    record = verdict.to_dict()
    word = "reject" if verdict.reject else "accept"
    print(f"{word}: M(r)={verdict.M_r:.6g} critical_radius={verdict.critical_radius:.6g} "
          f"r={r:.6g} alpha={args.alpha:g} candidates={verdict.candidate_count}")
    print(json.dumps(record, sort_keys=True))
    return {"verdict.json": _dump(record)}


def cmd_study(args, out):
    cfg = load_study_config(args.config)
    overrides = {}
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.grid is not None:
        overrides["grid"] = args.grid
    if overrides:
        fields = {f: getattr(cfg, f) for f in StudyConfig.__dataclass_fields__}
        fields.update(overrides)
        cfg = StudyConfig(**fields)
    result = run_study(cfg, out_dir=out, workers=args.threads,
                       progress=lambda msg: print(msg, file=sys.stderr))
    tables = []
    for m in cfg.models:
        tables.append(result.table(m, "r_hat"))
        tables.append(result.table(m, "d_mu", scale10=not args.raw))
    text = "\n\n".join(tables) + "\n"
    if result.failures:
        text += f"\n{len(result.failures)} failed replicates\n"
        for m, n, rep, msg in result.failures:
            text += f"  {m} n={n} replicate={rep}: {msg}\n"
    print(text, end="")
    buf = []
    buf.append(",".join(RECORD_FIELDS))
    for r in result.records:
        buf.append(",".join(_fmt(r[k]) for k in RECORD_FIELDS))
    return {"records.csv": "\n".join(buf) + "\n", "tables.txt": text}


def _region(spec, r, grid_res):
    """Return (region, boundary source, grid or None) for a metrics operand."""
    if spec.startswith("model:"):
        m = make_model(spec[len("model:"):])
        return m, m, None
    if spec.endswith(".grid"):
        return None, None, rio.read_grid(spec)
    cloud = _load_cloud(spec)
    hull = build_rconvex_hull(cloud, r)
    return hull, hull, None


def cmd_metrics(args, out):
    r = args.r
    if r is None:
        for spec in (args.a, args.b):
            if spec.startswith("model:"):
                r = make_model(spec[len("model:"):]).true_r0
                break
    grids = [s.endswith(".grid") for s in (args.a, args.b)]
    if any(grids):
        if not all(grids):
            raise UsageError("grid files can only be compared with grid files")
        ga, gb = rio.read_grid(args.a), rio.read_grid(args.b)
        report = {"d_mu": distance_in_measure(ga, gb), "d_H": hausdorff_sets(ga, gb),
                  "d_H_boundary": None, "grid_resolution": list(ga.resolution)}
    else:
        if r is None:
            raise UsageError("--r is required when neither operand is a model")
        if r == "diameter":
            raise UsageError("--r diameter is not defined for metrics")
        ra, _, _ = _region(args.a, r, args.grid)
        rb, _, _ = _region(args.b, r, args.grid)
        report = compare(ra, rb, grid=args.grid).to_dict()
    report["r"] = r
    print(" ".join(f"{k}={v}" for k, v in sorted(report.items())))
    return {"metrics.json": _dump(report)}


COMMANDS = {"estimate": cmd_estimate, "select": cmd_select, "test": cmd_test,
            "study": cmd_study, "metrics": cmd_metrics}


def _manifest(argv, args, inputs, outputs):
    flags = {k: (v if not (isinstance(v, float) and math.isinf(v)) else "inf")
             for k, v in sorted(vars(args).items())}
    return {
        "command": args.command,
        "argv": list(argv),
        "flags": flags,
        "inputs": {p: rio.sha256_file(p) for p in inputs},
        "outputs": outputs,
        "seed": flags.get("seed"),
        "version": _version(),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }


def _input_paths(args):
    paths = []
    for key in ("input", "config", "a", "b"):
        v = getattr(args, key, None)
        if v and not v.startswith("model:") and os.path.exists(v):
            paths.append(v)
    return paths


def run(argv):
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        return cmd_replay(args)
    if args.command == "sample":
        cloud = sample_uniform(make_model(args.model), args.n, args.seed, args.replicate)
        d = os.path.dirname(os.path.abspath(args.out))
        os.makedirs(d, exist_ok=True)
        rio.write_points(args.out, cloud)
        man = _manifest(argv, args, [], {os.path.basename(args.out): rio.sha256_file(args.out)})
        _write(args.out + ".manifest.json", _dump(man))
        print(f"wrote {cloud.n} points to {args.out}")
        return 0
    out = args.out
    os.makedirs(out, exist_ok=True)
    files = COMMANDS[args.command](args, out)
    digests = {}
    for name, text in files.items():
        path = os.path.join(out, name)
        _write(path, text)
        digests[name] = rio.sha256_file(path)
    _write(os.path.join(out, "manifest.json"), _dump(_manifest(argv, args, _input_paths(args), digests)))
    return 0


def _with_out(argv, out):
    argv = list(argv)
    for i, a in enumerate(argv):
        if a == "--out" and i + 1 < len(argv):
            argv[i + 1] = out
            return argv
        if a.startswith("--out="):
            argv[i] = f"--out={out}"
            return argv
    return argv + ["--out", out]


def cmd_replay(args):
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            man = json.load(fh)
        argv, expected = man["argv"], man["outputs"]
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    for path, digest in man.get("inputs", {}).items():
        if not os.path.exists(path) or rio.sha256_file(path) != digest:
            raise ReplayMismatch(f"input {path} is missing or changed")
    with tempfile.TemporaryDirectory() as tmp:
        target = args.out or tmp
        if man["command"] == "sample":
            name = next(iter(expected))
            new_argv = _with_out(argv, os.path.join(target, name))
            run(new_argv)
            got = {name: rio.sha256_file(os.path.join(target, name))}
        else:
            run(_with_out(argv, target))
            got = {name: rio.sha256_file(os.path.join(target, name)) for name in expected}
    bad = sorted(k for k in expected if got.get(k) != expected[k])
    if bad:
        raise ReplayMismatch(f"outputs differ: {', '.join(bad)}")
    print(f"replay ok: {len(expected)} output(s) identical")
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        return run(argv)
    except RHullError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": 3}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
