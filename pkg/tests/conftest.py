import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from rhull.geometry import PointCloud  # noqa: E402
from rhull.simulation import make_model, sample_uniform  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "src", "rhull", "data")


def cloud_of(pts, label="test"):
    return PointCloud.from_points(np.asarray(pts, dtype=float), label)


@pytest.fixture(scope="session")
def ring1500():
    return sample_uniform(make_model("ring"), 1500, 2024, 0)


@pytest.fixture(scope="session")
def ring500():
    return sample_uniform(make_model("ring"), 500, 2024, 0)


@pytest.fixture(scope="session")
def ring_hull(ring1500):
    from rhull.rconvex import build_rconvex_hull
    return build_rconvex_hull(ring1500, 0.15)


@pytest.fixture(scope="session")
def data_dir():
    return os.path.abspath(DATA)


ACCEPTANCE_LINES = []


def report(label, ok, detail):
    """Record one acceptance line and fail the calling test when ``ok`` is false."""
    line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
