import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import cloud_of
from oracles import brute_hull_vertices, prim_mst_weight
from rhull.errors import AllCollinear, EmptyCloud, TooFewPoints
from rhull.geometry import (PointCloud, convex_hull, convex_hull_indices, delaunay,
                            euclidean_mst, nearest_sample_distance)
from rhull.predicates import incircle, incircle_exact, orient2d, orient2d_exact

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


def random_cloud(n, seed):
    return cloud_of(np.random.default_rng(seed).random((n, 2)))


# predicates

def test_orient_nearly_collinear_is_exact():
    a, b = (0.5, 0.5), (12.0, 12.0)
    for k in range(1, 60):
        c = (0.5 + k * 2.0 ** -53, 0.5)
        assert orient2d(a, b, c) == orient2d_exact(a, b, c)


def test_incircle_cocircular_is_zero():
    assert incircle((0, 0), (1, 0), (1, 1), (0, 1)) == 0
    assert incircle((0, 0), (1, 0), (1, 1), (0.5, 0.5)) == 1
    assert incircle((0, 0), (1, 0), (1, 1), (2, 2)) == -1


@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=8, max_size=8))
def test_filtered_predicates_match_exact(v):
    a, b, c, d = v[0:2], v[2:4], v[4:6], v[6:8]
    assert orient2d(a, b, c) == orient2d_exact(a, b, c)
    if orient2d_exact(a, b, c) > 0:
        assert incircle(a, b, c, d) == incircle_exact(a, b, c, d)


# cloud ingestion

def test_duplicates_dropped_with_warning():
    with pytest.warns(UserWarning, match="duplicate"):
        c = cloud_of([[0, 0], [1, 0], [0, 0], [0, 1]])
    assert c.n == 3
    np.testing.assert_array_equal(c.points, [[0, 0], [1, 0], [0, 1]])


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        PointCloud.from_points([[0, 0], [np.nan, 1]])


def test_points_are_readonly():
    c = cloud_of(SQUARE)
    with pytest.raises(ValueError):
        c.points[0, 0] = 5.0


# delaunay

def test_three_points_one_triangle():
    t = delaunay(cloud_of([[0, 0], [1, 0], [0, 1]]))
    assert t.triangles.shape == (1, 3)


def test_square_two_triangles_lowest_index_diagonal():
    for perm in itertools.permutations(range(4)):
        pts = np.array(SQUARE, float)[list(perm)]
        t = delaunay(cloud_of(pts))
        assert len(t.triangles) == 2
        shared = set(t.triangles[0]) & set(t.triangles[1])
        assert 0 in shared


@pytest.mark.parametrize("seed", range(3))
def test_euler_count_against_brute_hull(seed):
    c = random_cloud(200, seed)
    h = len(brute_hull_vertices(c.points))
    assert len(delaunay(c).triangles) == 2 * c.n - 2 - h


@pytest.mark.parametrize("n,seed", [(20, 0), (100, 1), (200, 2)])
def test_empty_circumcircle_exhaustive(n, seed):
    c = random_cloud(n, seed)
    pts = c.points
    for a, b, cc in delaunay(c).triangles:
        assert orient2d(pts[a], pts[b], pts[cc]) > 0
        for d in range(n):
            if d not in (a, b, cc):
                assert incircle(pts[a], pts[b], pts[cc], pts[d]) <= 0


def test_lattice_triangulation_is_delaunay():
    g = np.stack(np.meshgrid(np.arange(6.0), np.arange(6.0)), -1).reshape(-1, 2)
    t = delaunay(cloud_of(g))
    assert len(t.triangles) == 2 * 25
    for a, b, c in t.triangles:
        for d in range(len(g)):
            if d not in (a, b, c):
                assert incircle(g[a], g[b], g[c], g[d]) <= 0


def test_delaunay_neighbors_symmetric():
    t = delaunay(random_cloud(60, 5))
    for s, row in enumerate(t.neighbors):
        for nb in row:
            if nb >= 0:
                assert s in t.neighbors[nb]


def test_delaunay_errors():
    with pytest.raises(TooFewPoints):
        delaunay(cloud_of([[0, 0], [1, 1]]))
    with pytest.raises(AllCollinear):
        delaunay(cloud_of([[0, 0], [1, 1], [2, 2], [3, 3]]))


def test_delaunay_deterministic():
    c = random_cloud(300, 9)
    np.testing.assert_array_equal(delaunay(c).triangles, delaunay(c).triangles)


# convex hull

def test_hull_square_with_center():
    h = convex_hull(cloud_of(SQUARE + [[0.5, 0.5]]))
    assert {tuple(p) for p in h} == {tuple(map(float, p)) for p in SQUARE}


@pytest.mark.parametrize("seed", range(3))
def test_hull_matches_brute_force(seed):
    c = random_cloud(50, seed)
    assert set(convex_hull_indices(c).tolist()) == brute_hull_vertices(c.points)


def test_hull_cocircular_all_vertices():
    t = np.linspace(0, 2 * math.pi, 17)[:-1]
    c = cloud_of(np.column_stack([np.cos(t), np.sin(t)]))
    assert len(convex_hull(c)) == 16


def test_hull_collinear_edge_points_excluded():
    pts = SQUARE + [[0.5, 0.0], [1.0, 0.25]]
    assert set(convex_hull_indices(cloud_of(pts)).tolist()) == {0, 1, 2, 3}


@given(st.integers(3, 60), st.integers(0, 10_000))
def test_hull_ccw_and_contains_all(n, seed):
    c = random_cloud(n, seed)
    h = convex_hull(c)
    for k in range(len(h)):
        a, b = h[k], h[(k + 1) % len(h)]
        cross = (b[0] - a[0]) * (c.points[:, 1] - a[1]) - (b[1] - a[1]) * (c.points[:, 0] - a[0])
        assert np.all(cross >= -1e-12)


def test_hull_collinear_error():
    with pytest.raises(AllCollinear):
        convex_hull(cloud_of([[0, 0], [1, 2], [2, 4]]))


# minimum spanning tree

def test_mst_two_points():
    e, w = euclidean_mst(cloud_of([[0, 0], [3, 0]]))
    assert e.tolist() == [[0, 1]] and w.tolist() == [3.0]


def test_mst_equilateral():
    pts = [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]
    _, w = euclidean_mst(cloud_of(pts))
    assert len(w) == 2
    assert w.sum() == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("n,seed", [(30, 0), (50, 1), (10, 2), (45, 3)])
def test_mst_matches_prim(n, seed):
    c = random_cloud(n, seed)
    e, w = euclidean_mst(c)
    total, longest = prim_mst_weight(c.points)
    assert len(e) == n - 1
    assert w.sum() == pytest.approx(total, rel=1e-12)
    assert w.max() == pytest.approx(longest, rel=1e-12)


def test_mst_is_spanning_tree():
    c = random_cloud(80, 4)
    e, _ = euclidean_mst(c)
    parent = list(range(c.n))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for a, b in e:
        ra, rb = find(a), find(b)
        assert ra != rb
        parent[ra] = rb


def test_mst_collinear_cloud():
    _, w = euclidean_mst(cloud_of([[0, 0], [2, 0], [1, 0], [5, 0]]))
    assert sorted(w.tolist()) == [1.0, 1.0, 3.0]


def test_mst_too_few():
    with pytest.raises(TooFewPoints):
        euclidean_mst(cloud_of([[0, 0]]))


# nearest sample

def test_nearest_examples():
    c = cloud_of([[0, 0]])
    assert nearest_sample_distance((3, 4), c) == 5.0
    c = random_cloud(10, 0)
    assert nearest_sample_distance(c.points[3], c) == 0.0


def test_nearest_matches_exhaustive():
    rng = np.random.default_rng(1)
    c = cloud_of(rng.random((100, 2)))
    q = rng.random((100, 2))
    brute = np.sqrt(((q[:, None] - c.points[None]) ** 2).sum(-1)).min(1)
    np.testing.assert_allclose(nearest_sample_distance(q, c), brute, rtol=0, atol=1e-15)


def test_nearest_empty():
    with pytest.raises(EmptyCloud):
        nearest_sample_distance((0, 0), cloud_of(np.zeros((0, 2))))


def test_diameter():
    assert cloud_of(SQUARE).diameter == pytest.approx(math.sqrt(2))
