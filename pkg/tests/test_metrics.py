import itertools
import math

import numpy as np
import pytest

from meshforge import (Mesh, ZeroAreaMeshError, point_triangle_distance,
                       sampled_deviation, shapes)
from meshforge.metrics import (min_distances_to_mesh,
                               min_distances_to_mesh_brute, sample_surface)


def test_point_triangle_interior():
    tri = [(0, 0, 0), (1, 0, 0), (0, 1, 0)]
    assert point_triangle_distance((0.2, 0.2, 1.0), tri) == pytest.approx(1.0)


def test_point_triangle_nearest_vertex():
    tri = [(0, 0, 0), (1, 0, 0), (0, 1, 0)]
    assert point_triangle_distance((2, 0, 0), tri) == pytest.approx(1.0)


def test_point_triangle_on_surface():
    tri = [(0, 0, 0), (1, 0, 0), (0, 1, 0)]
    assert point_triangle_distance((0.25, 0.25, 0.0), tri) == 0.0


def test_point_triangle_nearest_edge():
    tri = [(0, 0, 0), (2, 0, 0), (0, 2, 0)]
    assert point_triangle_distance((1.0, -1.0, 0.0), tri) == pytest.approx(1.0)


def test_point_triangle_degenerate_collinear():
    tri = [(0, 0, 0), (1, 0, 0), (2, 0, 0)]
    assert point_triangle_distance((1.0, 1.0, 0.0), tri) == pytest.approx(1.0)
    tri_point = [(1, 1, 1)] * 3
    assert point_triangle_distance((1, 1, 3), tri_point) == pytest.approx(2.0)


def test_point_triangle_permutation_symmetry():
    rng = np.random.RandomState(2)
    for _ in range(50):
        tri = rng.uniform(-1, 1, size=(3, 3))
        p = rng.uniform(-2, 2, size=3)
        base = point_triangle_distance(p, tri)
        for perm in itertools.permutations(range(3)):
            assert point_triangle_distance(p, tri[list(perm)]) == \
                pytest.approx(base, rel=1e-12, abs=1e-12)


def test_point_triangle_matches_dense_sampling_oracle():
    # barycentric grid search lower-bounds the exact distance
    rng = np.random.RandomState(4)
    for _ in range(20):
        tri = rng.uniform(-1, 1, size=(3, 3))
        p = rng.uniform(-2, 2, size=3)
        d = point_triangle_distance(p, tri)
        best = math.inf
        steps = 60
        for i in range(steps + 1):
            for j in range(steps + 1 - i):
                u = i / steps
                v = j / steps
                q = (1 - u - v) * tri[0] + u * tri[1] + v * tri[2]
                best = min(best, float(np.linalg.norm(p - q)))
        assert d <= best + 1e-12
        assert d >= best - 0.05  # grid resolution slack


def test_sample_surface_deterministic(ico3):
    a = sample_surface(ico3, 500, seed=9)
    b = sample_surface(ico3, 500, seed=9)
    assert np.array_equal(a, b)
    c = sample_surface(ico3, 500, seed=10)
    assert not np.array_equal(a, c)


def test_sample_surface_points_on_surface(ico3):
    pts = sample_surface(ico3, 300, seed=1)
    d = min_distances_to_mesh_brute(pts, ico3)
    assert float(d.max()) <= 1e-12


def test_sample_surface_area_proportional():
    # two parallel triangles, one 100x the area of the other
    m = Mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0],
              [0, 0, 1], [10, 0, 1], [0, 10, 1]],
             [(0, 1, 2), (3, 4, 5)])
    pts = sample_surface(m, 1000, seed=3)
    near_small = int(np.sum(np.abs(pts[:, 2]) < 0.5))
    assert near_small == 10  # floor(1000/101) + largest-remainder rounding


def test_sample_surface_zero_area():
    m = Mesh([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [(0, 1, 2)])
    with pytest.raises(ZeroAreaMeshError):
        sample_surface(m, 10, seed=0)


def test_identical_meshes_zero_deviation(ico3):
    # zero up to the rounding of the barycentric point construction
    report = sampled_deviation(ico3, ico3, samples=400, seed=5)
    assert report.max <= 1e-12
    assert report.mean <= report.max
    assert report.direction == "A->B"


def test_devation_report_roundtrip(ico3):
    report = sampled_deviation(ico3, ico3, samples=10, seed=1, symmetric=True)
    doc = report.to_dict()
    assert set(doc) == {"mean", "max", "samples", "seed", "direction"}
    assert doc["direction"] == "symmetric"
    assert doc["samples"] == 10
    assert doc["seed"] == 1


def test_deviation_deterministic(ico3):
    small = shapes.icosphere(1)
    r1 = sampled_deviation(ico3, small, samples=500, seed=7, symmetric=True)
    r2 = sampled_deviation(ico3, small, samples=500, seed=7, symmetric=True)
    assert r1 == r2


def test_cube_vs_scaled_cube_bound(box):
    scaled = Mesh(box.positions * 1.1, box.faces.copy())
    report = sampled_deviation(box, scaled, samples=1000, seed=11,
                               symmetric=True)
    # cube of side 2 scaled 1.1 about its center: max offset at the corner
    assert report.max <= 0.1 * math.sqrt(3) + 1e-9
    assert report.mean <= report.max
    # oracle: brute-force distances for the A->B direction
    pts = sample_surface(box, 1000, seed=11)
    brute = min_distances_to_mesh_brute(pts, scaled)
    fast = min_distances_to_mesh(pts, scaled)
    assert np.array_equal(brute, fast)


def test_grid_equals_bruteforce_many_cases():
    rng = np.random.RandomState(13)
    targets = [shapes.icosphere(1), shapes.tetrahedron(),
               Mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [(0, 1, 2)]),
               Mesh([[0, 0, 0], [1, 0, 0], [2, 0, 0],
                     [0, 1, 0], [1, 1, 0], [0, 0, 2]],
                    [(0, 1, 2), (0, 3, 4), (1, 4, 5)])]  # incl. degenerate
    for target in targets:
        pts = rng.uniform(-3, 3, size=(200, 3))
        fast = min_distances_to_mesh(pts, target)
        brute = min_distances_to_mesh_brute(pts, target)
        assert np.array_equal(fast, brute)


def test_deviation_rejects_faceless():
    m = Mesh([[0, 0, 0]], None)
    with pytest.raises(ZeroAreaMeshError):
        sampled_deviation(m, shapes.tetrahedron(), samples=10, seed=0)
    with pytest.raises(ZeroAreaMeshError):
        sampled_deviation(shapes.tetrahedron(), m, samples=10, seed=0)


def test_symmetric_pools_both_directions():
    # a tiny triangle centered inside a big sphere: one-sided deviation from
    # the triangle is the gap to the sphere; symmetric picks up the far side
    tri = Mesh([[-0.1, -0.1, 0], [0.1, -0.1, 0], [0, 0.1, 0]], [(0, 1, 2)])
    sphere = shapes.icosphere(2, radius=1.0)
    one = sampled_deviation(tri, sphere, samples=300, seed=2)
    sym = sampled_deviation(tri, sphere, samples=300, seed=2, symmetric=True)
    assert sym.max > one.max  # far hemisphere is ~1 away from the triangle
    assert sym.max >= 0.9
