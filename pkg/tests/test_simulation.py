import math
import os

import numpy as np
import pytest

from rhull.errors import InvalidConfig, RejectionStall, UnknownModel
from rhull.metrics import distance_in_measure, rasterize_region
from rhull.rconvex import build_rconvex_hull
from rhull.selector import estimate_support, select_mm, select_rs
from rhull.simulation import (MODEL_NAMES, StudyConfig, SupportModel, convergence_probe,
                              load_study_config, loglog_slope, make_model, read_records,
                              replay, run_replicate, run_study, sample_uniform,
                              write_records)

UNIT = (0, 1, 0, 1)


def canon(rows):
    # repr keeps every bit and makes nan comparable
    return [[repr(r[k]) for k in sorted(r)] for r in rows]


# models

def test_ring_examples():
    m = make_model("ring")
    assert m.true_area == pytest.approx(0.31416, abs=1e-5)
    assert m.true_r0 == 0.15
    assert not m.contains(np.array([0.5, 0.5]))
    assert m.contains(np.array([0.85, 0.5]))
    assert m.contains(np.array([0.65, 0.5]))


def test_letter_models():
    c, s = make_model("cshape"), make_model("sshape")
    assert c.true_r0 == 0.2 and s.true_r0 == 0.0353
    assert not c.contains(np.array([0.8, 0.5]))       # the gap opens to the right
    assert c.contains(np.array([0.2, 0.5]))
    assert s.contains(np.array([0.5 - 0.0953, 0.5 + 0.0953]))
    assert s.contains(np.array([0.5 + 0.0953, 0.5 - 0.0953]))
    assert not s.contains(np.array([0.5 + 0.0953, 0.5 + 0.0953]))


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_model_area_matches_grid(name):
    m = make_model(name)
    g = rasterize_region(m, m.box, 600)
    assert g.mask.sum() * g.cell_area == pytest.approx(m.true_area, rel=0.01)
    assert m.true_r0 > 0


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_model_boundary_pieces_lie_on_boundary(name):
    m = make_model(name)
    pts = np.concatenate([p.sample(50) for p in m.boundary_pieces()])
    eps = 1e-6
    near_in = np.zeros(len(pts), bool)
    near_out = np.zeros(len(pts), bool)
    for t in np.linspace(0, 2 * math.pi, 16, endpoint=False):
        off = eps * np.array([math.cos(t), math.sin(t)])
        inside = m.contains(pts + off)
        near_in |= inside
        near_out |= ~inside
    assert near_in.all() and near_out.all()


def test_unknown_model():
    with pytest.raises(UnknownModel):
        make_model("triangle")


# sampling

@pytest.mark.parametrize("name", MODEL_NAMES)
def test_samples_inside(name):
    m = make_model(name)
    c = sample_uniform(m, 800, 3)
    assert c.n == 800 and m.contains(c.points).all()


def test_acceptance_rate_binomial():
    m = make_model("ring")
    rng = np.random.default_rng(0)
    u = rng.random((10 ** 5, 2))
    x0, x1, y0, y1 = m.box
    prop = np.column_stack([x0 + (x1 - x0) * u[:, 0], y0 + (y1 - y0) * u[:, 1]])
    p = m.true_area / ((x1 - x0) * (y1 - y0))
    rate = m.contains(prop).mean()
    assert abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / 10 ** 5)


def test_sampling_deterministic_and_independent():
    m = make_model("ring")
    a, b = sample_uniform(m, 100, 5, 2), sample_uniform(m, 100, 5, 2)
    assert a.points.tobytes() == b.points.tobytes()
    assert not np.array_equal(a.points, sample_uniform(m, 100, 5, 3).points)
    assert not np.array_equal(a.points, sample_uniform(m, 100, 6, 2).points)


def test_uniformity_of_sampler():
    # quadrant counts on the ring are balanced
    c = sample_uniform(make_model("ring"), 8000, 9)
    q = (c.points[:, 0] > 0.5).astype(int) * 2 + (c.points[:, 1] > 0.5)
    counts = np.bincount(q, minlength=4)
    assert np.all(np.abs(counts - 2000) < 4 * math.sqrt(2000 * 0.75))


def test_rejection_stall():
    tiny = SupportModel("tiny", lambda x: np.hypot(x[..., 0], x[..., 1]) < 1e-3,
                        (0, 1, 0, 1), math.pi * 1e-6, 1e-3)
    with pytest.raises(RejectionStall):
        sample_uniform(tiny, 50, 0)


# study configuration

def test_config_validation_collects_everything(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[study]\nmodels = ring, blob\nsample_sizes = 5\nalphas = 1.5\n"
                 "replicates = 0\nwhatever = 1\n")
    with pytest.raises(InvalidConfig) as e:
        load_study_config(p)
    msg = str(e.value)
    for needle in ("blob", "sample size 5", "alpha 1.5", "replicates", "whatever"):
        assert needle in msg


def test_shipped_configs(data_dir):
    desk = load_study_config(os.path.join(data_dir, "desk.ini"))
    assert desk.sample_sizes == (100, 500, 1000, 1500)
    assert desk.alphas == (1e-1, 1e-2, 1e-3, 1e-4)
    assert desk.replicates == 200 and desk.nu == 0.95 and desk.max_cycles == 4
    smoke = load_study_config(os.path.join(data_dir, "smoke.ini"))
    assert smoke.replicates == 1


def test_config_rejects_bad_values():
    with pytest.raises(InvalidConfig):
        StudyConfig(alphas=(1.5,))
    with pytest.raises(InvalidConfig):
        StudyConfig(sample_sizes=(9,))


# replicates and studies

SMALL = StudyConfig(models=("ring",), sample_sizes=(100,), alphas=(0.1, 0.01), replicates=2,
                    seed=11, max_iterations=8)


def test_replicate_equals_manual_pipeline():
    rows = run_replicate(SMALL, "ring", 100, 0)
    m = make_model("ring")
    c = sample_uniform(m, 100, 11, 0)
    truth = rasterize_region(m, UNIT, 334)
    by_kind = {(r["kind"], r["alpha"] if r["kind"] == "rs" else None): r for r in rows}
    for a in SMALL.alphas:
        cfg = SMALL.selector(a)
        tr = select_rs(c, cfg)
        h = estimate_support(c, cfg, tr)
        rec = by_kind[("rs", a)]
        assert rec["r"] == tr.r_hat and rec["outcome"] == tr.outcome
        assert rec["d_mu"] == distance_in_measure(h.rasterize(UNIT, 334), truth)
    mm = select_mm(c)
    assert by_kind[("mm", None)]["r"] == mm
    bench = build_rconvex_hull(c, 0.15).rasterize(UNIT, 334)
    assert by_kind[("benchmark", None)]["d_mu"] == distance_in_measure(bench, truth)


def test_study_resume_and_replay(tmp_path):
    res = run_study(SMALL, out_dir=tmp_path)
    assert not res.failures
    assert len(res.records) == 2 * (len(SMALL.alphas) + 2)
    cell = tmp_path / "cells" / "ring_n100.csv"
    assert cell.exists()
    again = run_study(SMALL, out_dir=tmp_path)
    assert canon(again.records) == canon(res.records)
    # replay any single replicate bit for bit
    stored = [r for r in read_records(cell) if r["replicate"] == 1]
    fresh = replay(SMALL, "ring", 100, 1)
    out = tmp_path / "one.csv"
    write_records(out, fresh)
    assert canon(read_records(out)) == canon(stored)


def test_records_round_trip(tmp_path):
    rows = run_replicate(SMALL, "ring", 100, 0)
    p = tmp_path / "r.csv"
    write_records(p, rows)
    back = read_records(p)
    for a, b in zip(rows, back):
        for k, v in a.items():
            assert (isinstance(v, float) and math.isnan(v) and math.isnan(b[k])) or b[k] == v


def test_parallel_matches_serial(tmp_path):
    serial = run_study(SMALL)
    par = run_study(SMALL, workers=2)
    assert canon(par.records) == canon(serial.records)


def test_failures_are_reported(monkeypatch):
    import rhull.simulation as sim

    real = sim.run_replicate

    def flaky(cfg, model, n, rep):
        if rep == 1:
            raise RuntimeError("boom")
        return real(cfg, model, n, rep)

    monkeypatch.setattr(sim, "run_replicate", flaky)
    res = run_study(SMALL)
    assert len(res.failures) == 1 and "boom" in res.failures[0][3]
    assert {r["replicate"] for r in res.records} == {0}


def test_table_layout():
    res = run_study(SMALL)
    lines = res.table("ring").splitlines()
    assert "100" in lines[1]
    body = lines[3:]
    assert [l.split()[0] for l in body] == ["RS", "a=0.01", "MM"]
    mu = res.table("ring", "d_mu").splitlines()
    assert mu[-1].split()[0] == "r0-hull"
    assert float(mu[-1].split()[1]) == pytest.approx(
        10 * res.mean("d_mu", kind="benchmark"), abs=1e-4)


def test_aggregates_count():
    res = run_study(SMALL)
    agg = res.aggregates()
    assert all(v["count"] == 2 for v in agg.values())
    assert ("ring", 100, "rs", 0.1) in agg


# convergence probe helpers

def test_loglog_slope_exact():
    n = np.array([100, 200, 400, 800])
    assert loglog_slope(n, 3 * n ** -0.7) == pytest.approx(-0.7)
    assert loglog_slope(n, np.ones(4)) == pytest.approx(0.0)


def test_probe_flags_flat_metric():
    res = convergence_probe("ring", (200, 400, 800), 1, hausdorff=False)
    assert res.slope < 0
    flat = type(res)(res.sizes, (1.0, 1.0, 1.0), res.mean_d_H, 0.0, math.nan)
    assert not flat.ok


def test_probe_needs_three_sizes():
    with pytest.raises(InvalidConfig):
        convergence_probe("ring", (100, 200), 1)


# pattern checks on the letter shapes

@pytest.fixture(scope="module")
def cshape_small():
    cfg = StudyConfig(models=("cshape",), sample_sizes=(100,), alphas=(0.1,), replicates=100,
                      seed=0)
    return run_study(cfg)


def test_cshape_small_n_overestimates(cshape_small):
    m = cshape_small.mean("r", kind="rs")
    assert m - 3 * cshape_small.stderr("r", kind="rs") > 0.2


@pytest.mark.xfail(strict=True, reason="reconstructed C geometry overestimates less")
def test_cshape_small_n_overestimate_size(cshape_small):
    assert cshape_small.mean("r", kind="rs") > 0.21
