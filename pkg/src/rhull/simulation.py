"""Benchmark supports, uniform samplers and the Monte Carlo study harness."""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidConfig, RejectionStall, UnknownModel
from .geometry import PointCloud
from .metrics import DEFAULT_GRID, distance_in_measure, hausdorff_sets, rasterize_region
from .rconvex import ArcSegment, LineSegment, build_rconvex_hull
from .selector import SelectorConfig, estimate_support, select_mm, select_rs
from .spacing import DEFAULT_STEP

UNIT_BOX = (0.0, 1.0, 0.0, 1.0)
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class SupportModel:
    """A known support with vectorised membership.

    ``box`` is ``(xmin, xmax, ymin, ymax)`` and encloses the support.
    """

    name: str
    contains: object = field(repr=False)
    box: tuple
    true_area: float
    true_r0: float
    pieces: tuple = field(default=(), repr=False)

    def boundary_pieces(self):
        return list(self.pieces)


def _full_circle(cx, cy, rad):
    return ArcSegment((cx, cy), rad, 0.0, 0.0, True, True)


def _arc(cx, cy, rad, a0, a1):
    return ArcSegment((cx, cy), rad, a0 % TWO_PI, a1 % TWO_PI, True)


def _ring():
    c, outer, inner = 0.5, 0.35, 0.15

    def contains(x):
        x = np.asarray(x, dtype=float)
        d = np.hypot(x[..., 0] - c, x[..., 1] - c)
        return (d <= outer) & (d >= inner)

    pieces = (_full_circle(c, c, outer), _full_circle(c, c, inner))
    return SupportModel("ring", contains, (c - outer, c + outer, c - outer, c + outer),
                        math.pi * (outer ** 2 - inner ** 2), inner, pieces)


def _cshape():
    # annulus with a quarter removed on the right; the inner radius sets r0
    c, outer, inner, half_gap = 0.5, 0.35, 0.2, math.pi / 4

    def contains(x):
        x = np.asarray(x, dtype=float)
        dx, dy = x[..., 0] - c, x[..., 1] - c
        d = np.hypot(dx, dy)
        ang = np.abs(np.arctan2(dy, dx))
        return (d <= outer) & (d >= inner) & (ang >= half_gap)

    u0 = (math.cos(half_gap), math.sin(half_gap))
    pieces = (
        _arc(c, c, outer, half_gap, -half_gap),
        _arc(c, c, inner, half_gap, -half_gap),
        LineSegment((c + inner * u0[0], c + inner * u0[1]), (c + outer * u0[0], c + outer * u0[1])),
        LineSegment((c + inner * u0[0], c - inner * u0[1]), (c + outer * u0[0], c - outer * u0[1])),
    )
    area = 0.75 * math.pi * (outer ** 2 - inner ** 2)
    return SupportModel("cshape", contains, (c - outer, c + outer, c - outer, c + outer),
                        area, inner, pieces)


def _sshape():
    # two half annuli joined end to end; the top one opens right, the bottom left
    inner, width = 0.0353, 0.12
    outer = inner + width
    mid = inner + 0.5 * width
    top = (0.5, 0.5 + mid)
    bot = (0.5, 0.5 - mid)

    def contains(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=bool)
        for (cx, cy), left in ((top, True), (bot, False)):
            dx, dy = x[..., 0] - cx, x[..., 1] - cy
            d = np.hypot(dx, dy)
            side = dx <= 0 if left else dx >= 0
            out |= (d >= inner) & (d <= outer) & side
        return out

    pieces = (
        _arc(top[0], top[1], outer, math.pi / 2, 3 * math.pi / 2),
        _arc(top[0], top[1], inner, math.pi / 2, 3 * math.pi / 2),
        _arc(bot[0], bot[1], outer, -math.pi / 2, math.pi / 2),
        _arc(bot[0], bot[1], inner, -math.pi / 2, math.pi / 2),
        LineSegment((0.5, top[1] + inner), (0.5, top[1] + outer)),
        LineSegment((0.5, bot[1] - inner), (0.5, bot[1] - outer)),
    )
    area = math.pi * (outer ** 2 - inner ** 2)
    box = (0.5 - outer, 0.5 + outer, bot[1] - outer, top[1] + outer)
    return SupportModel("sshape", contains, box, area, inner, pieces)


def _square():
    # convex control support, used for level checks of the test
    def contains(x):
        x = np.asarray(x, dtype=float)
        return np.all((x >= 0.0) & (x <= 1.0), axis=-1)

    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    pieces = tuple(LineSegment(corners[k], corners[(k + 1) % 4]) for k in range(4))
    return SupportModel("square", contains, UNIT_BOX, 1.0, math.inf, pieces)


_MODELS = {"ring": _ring, "cshape": _cshape, "sshape": _sshape, "square": _square}
MODEL_NAMES = tuple(_MODELS)


@lru_cache(maxsize=None)
def make_model(name: str) -> SupportModel:
    try:
        return _MODELS[name]()
    except KeyError:
        raise UnknownModel(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}") from None


def replicate_seed(seed: int, model: str, n: int, replicate: int) -> np.random.SeedSequence:
    """Independent stream for one (model, n, replicate) cell entry."""
    return np.random.SeedSequence([int(seed), zlib.crc32(model.encode()), int(n), int(replicate)])


def sample_uniform(model: SupportModel, n: int, seed: int, replicate: int = 0) -> PointCloud:
    """``n`` i.i.d. uniform points on the model by rejection from its box."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(replicate_seed(seed, model.name, n, replicate))
    xmin, xmax, ymin, ymax = model.box
    got, proposed, accepted = [], 0, 0
    while accepted < n:
        batch = max(64, 2 * (n - accepted))
        u = rng.random((batch, 2))
        x = np.column_stack([xmin + (xmax - xmin) * u[:, 0], ymin + (ymax - ymin) * u[:, 1]])
        ok = x[model.contains(x)]
        proposed += batch
        accepted += len(ok)
        got.append(ok)
        if proposed >= 100_000 and accepted < 1e-3 * proposed:
            raise RejectionStall(f"acceptance rate {accepted / proposed:.2e} below 1e-3")
    pts = np.concatenate(got)[:n]
    return PointCloud.from_points(pts, f"{model.name}:n={n}:seed={seed}:rep={replicate}")


# ---------------------------------------------------------------------------
# study


@dataclass(frozen=True)
class StudyConfig:
    models: tuple = ("ring",)
    sample_sizes: tuple = (100, 500, 1000, 1500)
    alphas: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    replicates: int = 200
    seed: int = 0
    grid: int = DEFAULT_GRID
    max_iterations: int = 20
    max_cycles: int = 4
    nu: float = 0.95
    angular_step: float = DEFAULT_STEP
    hausdorff: bool = False

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise InvalidConfig("; ".join(problems))

    def problems(self):
        out = []
        for m in self.models:
            if m not in _MODELS:
                out.append(f"unknown model {m!r}")
        if not self.models:
            out.append("no models given")
        if not self.sample_sizes:
            out.append("no sample sizes given")
        for n in self.sample_sizes:
            if int(n) < 10:
                out.append(f"sample size {n} below 10")
        if not self.alphas:
            out.append("no alphas given")
        for a in self.alphas:
            if not (0.0 < a < 1.0):
                out.append(f"alpha {a} outside (0, 1)")
        if int(self.replicates) < 1:
            out.append(f"replicates must be >= 1, got {self.replicates}")
        if int(self.grid) < 2:
            out.append(f"grid must be >= 2, got {self.grid}")
        if int(self.max_iterations) < 1:
            out.append(f"max_iterations must be >= 1, got {self.max_iterations}")
        if int(self.max_cycles) < 1:
            out.append(f"max_cycles must be >= 1, got {self.max_cycles}")
        if not (0.0 < self.nu < 1.0):
            out.append(f"nu {self.nu} outside (0, 1)")
        if not self.angular_step > 0:
            out.append(f"angular_step must be positive, got {self.angular_step}")
        return out

    def selector(self, alpha):
        return SelectorConfig(alpha=alpha, max_iterations=self.max_iterations,
                              max_cycles=self.max_cycles, nu=self.nu,
                              angular_step=self.angular_step, seed=self.seed)


def _split(text):
    return [t.strip() for t in text.replace(";", ",").split(",") if t.strip()]


def load_study_config(path) -> StudyConfig:
    """Read a ``[study]`` section (plus optional ``[selector]``) from an INI
    file. Every problem found is reported in one :class:`InvalidConfig`."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    if not parser.has_section("study"):
        raise InvalidConfig(f"{path}: missing [study] section")
    sec = dict(parser.items("study"))
    if parser.has_section("selector"):
        sec.update(parser.items("selector"))
    known = {f for f in StudyConfig.__dataclass_fields__}
    errors, kw = [], {}
    casts = {
        "models": lambda s: tuple(_split(s)),
        "sample_sizes": lambda s: tuple(int(v) for v in _split(s)),
        "alphas": lambda s: tuple(float(v) for v in _split(s)),
        "replicates": int, "seed": int, "grid": int, "max_iterations": int,
        "max_cycles": int, "nu": float, "angular_step": float,
        "hausdorff": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    }
    for key, raw in sec.items():
        if key not in known:
            errors.append(f"unknown key {key!r}")
            continue
        try:
            kw[key] = casts[key](raw)
        except ValueError:
            errors.append(f"bad value for {key}: {raw!r}")
    base = StudyConfig.__new__(StudyConfig)
    for f in StudyConfig.__dataclass_fields__.values():
        object.__setattr__(base, f.name, kw.get(f.name, f.default))
    errors.extend(base.problems())
    if errors:
        raise InvalidConfig(f"{path}: " + "; ".join(errors))
    return StudyConfig(**kw)


RECORD_FIELDS = ["model", "n", "replicate", "seed", "kind", "alpha", "r", "outcome",
                 "iterations", "area", "cycles", "d_mu", "d_H"]


@lru_cache(maxsize=8)
def _model_grid(name, grid):
    return rasterize_region(make_model(name), UNIT_BOX, grid)


def run_replicate(cfg: StudyConfig, model_name: str, n: int, replicate: int) -> list:
    """All estimates for one sample; the unit of replay."""
    model = make_model(model_name)
    cloud = sample_uniform(model, n, cfg.seed, replicate)
    truth = _model_grid(model_name, cfg.grid)
    base = dict(model=model_name, n=n, replicate=replicate, seed=cfg.seed)
    out = []

    def score(kind, alpha, r, hull, outcome="", iterations=0):
        g = hull.rasterize(UNIT_BOX, cfg.grid)
        rec = dict(base, kind=kind, alpha=alpha, r=r, outcome=outcome, iterations=iterations,
                   area=hull.area, cycles=hull.cycle_count,
                   d_mu=distance_in_measure(g, truth),
                   d_H=hausdorff_sets(g, truth) if cfg.hausdorff else math.nan)
        out.append(rec)

    for alpha in cfg.alphas:
        scfg = cfg.selector(alpha)
        trace = select_rs(cloud, scfg)
        hull = estimate_support(cloud, scfg, trace)
        score("rs", alpha, trace.r_hat, hull, trace.outcome, len(trace.iterations))
    r_mm = select_mm(cloud)
    score("mm", math.nan, r_mm, build_rconvex_hull(cloud, r_mm))
    score("benchmark", math.nan, model.true_r0, build_rconvex_hull(cloud, model.true_r0))
    return out


def _run_cell(args):
    cfg, model_name, n, reps = args
    rows, failures = [], []
    for rep in reps:
        try:
            rows.extend(run_replicate(cfg, model_name, n, rep))
        except Exception as exc:  # keep the rest of the cell
            failures.append((rep, f"{type(exc).__name__}: {exc}"))
    return model_name, n, rows, failures


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records(path, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in rows:
        w.writerow([_fmt(r[k]) for k in RECORD_FIELDS])
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)


def read_records(path):
    ints = {"n", "replicate", "seed", "iterations", "cycles"}
    strs = {"model", "kind", "outcome"}
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for r in csv.DictReader(fh):
            rows.append({k: (v if k in strs else int(v) if k in ints else float(v))
                         for k, v in r.items()})
    return rows


@dataclass
class StudyResult:
    config: StudyConfig
    records: list
    failures: list = field(default_factory=list)

    def select(self, **kw):
        out = []
        for r in self.records:
            ok = True
            for k, v in kw.items():
                rv = r[k]
                if isinstance(v, float) and isinstance(rv, float):
                    ok &= math.isclose(rv, v, rel_tol=1e-12)
                else:
                    ok &= rv == v
            if ok:
                out.append(r)
        return out

    def mean(self, quantity, **kw):
        vals = np.array([r[quantity] for r in self.select(**kw)], dtype=float)
        return float(vals.mean()) if len(vals) else math.nan

    def stderr(self, quantity, **kw):
        vals = np.array([r[quantity] for r in self.select(**kw)], dtype=float)
        return float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else math.nan

    def aggregates(self):
        """Cell means keyed by ``(model, n, kind, alpha)``."""
        keys = sorted({(r["model"], r["n"], r["kind"],
                        -1.0 if math.isnan(r["alpha"]) else r["alpha"]) for r in self.records})
        out = {}
        for m, n, kind, a in keys:
            sel = dict(model=m, n=n, kind=kind)
            if a >= 0:
                sel["alpha"] = a
            out[(m, n, kind, a if a >= 0 else math.nan)] = {
                "r_hat": self.mean("r", **sel), "d_mu": self.mean("d_mu", **sel),
                "count": len(self.select(**sel)),
            }
        return out

    def table(self, model, quantity="r_hat", scale10=True):
        """Text table laid out like the published ones: RS rows per alpha,
        then MM, plus the benchmark row for ``d_mu``."""
        sizes = list(self.config.sample_sizes)
        col = "r" if quantity == "r_hat" else "d_mu"
        k = 10.0 if (quantity == "d_mu" and scale10) else 1.0
        head = f"{'':4}{'':>12}" + "".join(f"{n:>10}" for n in sizes)
        lines = [f"{model}: mean {'r_hat' if col == 'r' else 'd_mu' + (' x10' if k != 1 else '')}",
                 head, "-" * len(head)]
        for i, a in enumerate(self.config.alphas):
            tag = "RS" if i == 0 else ""
            vals = [k * self.mean(col, model=model, n=n, kind="rs", alpha=a) for n in sizes]
            lines.append(f"{tag:4}{'a=' + format(a, 'g'):>12}" + "".join(f"{v:10.4f}" for v in vals))
        vals = [k * self.mean(col, model=model, n=n, kind="mm") for n in sizes]
        lines.append(f"{'MM':4}{'':>12}" + "".join(f"{v:10.4f}" for v in vals))
        if col == "d_mu":
            lines.append("-" * len(head))
            vals = [k * self.mean(col, model=model, n=n, kind="benchmark") for n in sizes]
            lines.append(f"{'':4}{'r0-hull':>12}" + "".join(f"{v:10.4f}" for v in vals))
        return "\n".join(lines)


def _cell_path(out_dir, model, n):
    return os.path.join(out_dir, "cells", f"{model}_n{n}.csv")


def run_study(cfg: StudyConfig, out_dir=None, workers: int = 1, progress=None) -> StudyResult:
    """Run every (model, n) cell; each writes its own CSV so an interrupted
    study resumes from the finished cells. Records come back ordered by
    (model, n, replicate) whatever the completion order."""
    cells = [(m, n) for m in cfg.models for n in cfg.sample_sizes]
    done, todo = {}, []
    if out_dir is not None:
        os.makedirs(os.path.join(out_dir, "cells"), exist_ok=True)
    for m, n in cells:
        path = _cell_path(out_dir, m, n) if out_dir else None
        if path and os.path.exists(path):
            rows = read_records(path)
            if len({r["replicate"] for r in rows}) == cfg.replicates:
                done[(m, n)] = rows
                if progress:
                    progress(f"cell {m} n={n}: reused {path}")
                continue
        todo.append((cfg, m, n, range(cfg.replicates)))
    failures = []

    def collect(result):
        m, n, rows, fails = result
        done[(m, n)] = rows
        failures.extend((m, n, rep, msg) for rep, msg in fails)
        if out_dir is not None and not fails:
            write_records(_cell_path(out_dir, m, n), rows)
        if progress:
            progress(f"cell {m} n={n}: {len(rows)} records, {len(fails)} failures")

    if workers > 1 and len(todo) > 0:
        # split cells into replicate chunks so a single cell still spreads out
        chunks = []
        for cfg_, m, n, reps in todo:
            step = max(1, math.ceil(len(reps) / workers))
            chunks += [(cfg_, m, n, reps[i:i + step]) for i in range(0, len(reps), step)]
        parts = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for m, n, rows, fails in pool.map(_run_cell, chunks):
                p = parts.setdefault((m, n), ([], []))
                p[0].extend(rows)
                p[1].extend(fails)
        for (m, n), (rows, fails) in parts.items():
            collect((m, n, rows, fails))
    else:
        for task in todo:
            collect(_run_cell(task))

    records = []
    for m, n in cells:
        rows = sorted(done.get((m, n), []), key=lambda r: r["replicate"])
        records.extend(rows)
    return StudyResult(cfg, records, failures)


def replay(cfg: StudyConfig, model: str, n: int, replicate: int) -> list:
    """Recompute one replicate's records from its seed."""
    return run_replicate(cfg, model, n, replicate)


@dataclass(frozen=True)
class ProbeResult:
    sizes: tuple
    mean_d_mu: tuple
    mean_d_H: tuple
    slope: float
    slope_H: float
    bounds: tuple = (-0.90, -0.45)

    @property
    def ok(self):
        return self.bounds[0] <= self.slope <= self.bounds[1]


def loglog_slope(sizes, values):
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def convergence_probe(model, sizes, replicates, seed: int = 0, grid: int = DEFAULT_GRID,
                      hausdorff: bool = True) -> ProbeResult:
    """Log-log slope of the mean error of the r0-hull against sample size."""
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 3:
        raise InvalidConfig("convergence_probe needs at least 3 sizes")
    m = make_model(model) if isinstance(model, str) else model
    truth = rasterize_region(m, UNIT_BOX, grid)
    mu, dh = [], []
    for n in sizes:
        a, b = [], []
        for rep in range(int(replicates)):
            cloud = sample_uniform(m, n, seed, rep)
            g = build_rconvex_hull(cloud, m.true_r0).rasterize(UNIT_BOX, grid)
            a.append(distance_in_measure(g, truth))
            if hausdorff:
                b.append(hausdorff_sets(g, truth))
        mu.append(float(np.mean(a)))
        dh.append(float(np.mean(b)) if b else math.nan)
    slope_h = loglog_slope(sizes, dh) if hausdorff else math.nan
    return ProbeResult(sizes, tuple(mu), tuple(dh), loglog_slope(sizes, mu), slope_h)
