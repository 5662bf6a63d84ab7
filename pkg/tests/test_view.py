import math

import numpy as np
import pytest

from meshforge import (ActiveFront, AdaptParams, Camera, Mesh, SimplifyConfig,
                       adapt, build_tree, cleanup, flythrough, is_silhouette,
                       render_set, screen_space_error, simplify)
from meshforge.vertex_tree import VertexNode
from meshforge.view_dependent import load_camera_path, camera_path_to_json


@pytest.fixture(scope="module")
def tree(ico3):
    result = simplify(ico3, SimplifyConfig(target_faces=0))
    return build_tree(ico3, result.records)


@pytest.fixture
def cam():
    return Camera(eye=(0.0, 0.0, 3.5), forward=(0.0, 0.0, -1.0),
                  up=(0.0, 1.0, 0.0), fov_y=math.pi / 3,
                  viewport_height=1080.0, near=0.01)


def _node(position, radius, cone_axis=(0, 0, 1), cone_angle=math.pi):
    return VertexNode(id=0, position=np.asarray(position, dtype=float),
                      children=None, parent=None, cost=0.0,
                      error_radius=radius,
                      cone_axis=np.asarray(cone_axis, dtype=float),
                      cone_angle=cone_angle)


def _fixpoint(front, tree, cam, params, cap=500):
    for _ in range(cap):
        prev = set(front.active)
        front = adapt(front, tree, cam, params)
        if front.active == prev:
            return front
    raise AssertionError("adapt did not reach a fixpoint")


# -- camera -------------------------------------------------------------------

def test_camera_validation():
    with pytest.raises(ValueError):
        Camera(eye=(0, 0, 0), forward=(0, 0, -2), up=(0, 1, 0),
               fov_y=1.0, viewport_height=100)
    with pytest.raises(ValueError):
        Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 0, -1),
               fov_y=1.0, viewport_height=100)
    with pytest.raises(ValueError):
        Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 1, 0),
               fov_y=0.0, viewport_height=100)


def test_camera_look_at():
    cam = Camera.look_at((3, 2, 1), (0, 0, 0))
    fwd = np.array(cam.forward)
    assert np.linalg.norm(fwd) == pytest.approx(1.0, abs=1e-12)
    assert abs(fwd @ np.array(cam.up)) <= 1e-9


# -- screen-space error ---------------------------------------------------------

def test_screen_error_formula():
    cam = Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 1, 0),
                 fov_y=math.pi / 2, viewport_height=1000.0, near=0.01)
    node = _node((0, 0, -10), 1.0)
    # radius * viewport / (2 tan(fov/2) depth) = 1000 / 20
    assert screen_space_error(node, cam) == pytest.approx(50.0, rel=1e-12)


def test_screen_error_zero_radius():
    cam = Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 1, 0),
                 fov_y=1.0, viewport_height=100.0, near=5.0)
    assert screen_space_error(_node((0, 0, -1), 0.0), cam) == 0.0
    assert screen_space_error(_node((0, 0, 99), 0.0), cam) == 0.0


def test_screen_error_depth_halving():
    cam = Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 1, 0),
                 fov_y=math.pi / 3, viewport_height=720.0, near=0.001)
    e1 = screen_space_error(_node((0, 0, -5), 0.25), cam)
    e2 = screen_space_error(_node((0, 0, -10), 0.25), cam)
    assert e1 == pytest.approx(2 * e2, rel=1e-12)


def test_screen_error_near_sentinel():
    cam = Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 1, 0),
                 fov_y=1.0, viewport_height=100.0, near=0.5)
    assert math.isinf(screen_space_error(_node((0, 0, -1), 0.6), cam))
    assert math.isinf(screen_space_error(_node((0, 0, 3), 1.0), cam))


# -- silhouette ------------------------------------------------------------------

def test_silhouette_perpendicular_axis():
    cam = Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 1, 0),
                 fov_y=1.0, viewport_height=100.0)
    node = _node((0, 0, -5), 0.1, cone_axis=(1, 0, 0), cone_angle=0.0)
    assert is_silhouette(node, cam)


def test_silhouette_parallel_axis():
    cam = Camera(eye=(0, 0, 0), forward=(0, 0, -1), up=(0, 1, 0),
                 fov_y=1.0, viewport_height=100.0)
    node = _node((0, 0, -5), 0.1, cone_axis=(0, 0, -1), cone_angle=0.0)
    assert not is_silhouette(node, cam)


def test_silhouette_full_cone_always():
    cam = Camera(eye=(2, 3, 4), forward=(0, 0, -1), up=(0, 1, 0),
                 fov_y=1.0, viewport_height=100.0)
    node = _node((0, 0, -5), 0.1, cone_angle=math.pi)
    assert is_silhouette(node, cam)


# -- adapt -----------------------------------------------------------------------

def test_roots_only_and_all_leaves_are_valid(tree):
    ActiveFront.roots_only(tree).validate(tree)
    ActiveFront.all_leaves(tree).validate(tree)


def test_adapt_tau_zero_reaches_all_leaves(tree, cam):
    params = AdaptParams(tau=0.0, hysteresis=0.0)
    front = _fixpoint(ActiveFront.roots_only(tree), tree, cam, params)
    assert front.active == set(range(tree.leaf_count))


def test_adapt_tau_inf_reaches_roots_only(tree, cam):
    params = AdaptParams(tau=math.inf, hysteresis=0.0)
    front = _fixpoint(ActiveFront.all_leaves(tree), tree, cam, params)
    assert front.active == set(tree.roots)


def test_adapt_preserves_cut_validity(tree, cam):
    params = AdaptParams(tau=2.0, tau_silhouette=1.0, hysteresis=0.25)
    front = ActiveFront.roots_only(tree)
    for _ in range(30):
        front = adapt(front, tree, cam, params)
        front.validate(tree)


def test_adapt_fixpoint_self_consistent(tree, cam):
    params = AdaptParams(tau=3.0, tau_silhouette=1.5, hysteresis=0.3)
    front = _fixpoint(ActiveFront.roots_only(tree), tree, cam, params)
    front.validate(tree)
    leaf = tree.leaf_count
    for nid in front.active:
        if nid >= leaf:
            err = screen_space_error(tree.node(nid), cam)
            tau_n = (params.tau_silhouette
                     if is_silhouette(tree.node(nid), cam) else params.tau)
            assert err <= tau_n
        parent = int(tree.parents[nid])
        if parent >= 0:
            a, b = tree.children[parent - leaf]
            if int(a) in front.active and int(b) in front.active:
                perr = screen_space_error(tree.node(parent), cam)
                tau_p = (params.tau_silhouette
                         if is_silhouette(tree.node(parent), cam) else params.tau)
                assert perr >= params.hysteresis * tau_p


def test_adapt_fixpoint_monotone_in_tau(tree, cam):
    taus = np.logspace(math.log10(0.25), math.log10(64.0), 8)
    counts = []
    for tau in taus:
        params = AdaptParams(tau=float(tau), hysteresis=0.0)
        front = _fixpoint(ActiveFront.roots_only(tree), tree, cam, params)
        counts.append(len(render_set(front, tree)))
    for a, b in zip(counts, counts[1:]):
        assert a >= b


def test_adapt_deterministic(tree, cam):
    params = AdaptParams(tau=2.0, hysteresis=0.2)
    f1 = ActiveFront.roots_only(tree)
    f2 = ActiveFront.roots_only(tree)
    for _ in range(10):
        f1 = adapt(f1, tree, cam, params)
        f2 = adapt(f2, tree, cam, params)
        assert f1.active == f2.active
        assert np.array_equal(f1.proxy, f2.proxy)


def test_adapt_max_ops_budget(tree, cam):
    params = AdaptParams(tau=0.0, hysteresis=0.0, max_ops_per_frame=3)
    front = ActiveFront.roots_only(tree)
    front = adapt(front, tree, cam, params)
    assert front.last_splits + front.last_merges <= 3
    front.validate(tree)
    # converges anyway, just more slowly
    for _ in range(2000):
        front = adapt(front, tree, cam, params)
        if front.active == set(range(tree.leaf_count)):
            break
    assert front.active == set(range(tree.leaf_count))


def test_adapt_budget_defers_lowest_error_first(tree, cam):
    from meshforge.view_dependent import _node_error
    front = ActiveFront.roots_only(tree)
    candidates = {nid: _node_error(tree, nid, cam)
                  for nid in front.active if nid >= tree.leaf_count}
    assert len(candidates) >= 2
    most_urgent = max(sorted(candidates), key=lambda nid: candidates[nid])
    out = adapt(front, tree, cam,
                AdaptParams(tau=0.0, hysteresis=0.0, max_ops_per_frame=1))
    assert out.last_splits == 1
    assert most_urgent not in out.active  # highest error split first
    deferred = [nid for nid in candidates if nid != most_urgent]
    assert all(nid in out.active for nid in deferred)


def test_adapt_projection_soundness_sampling(tree, cam):
    # active nodes' descendant leaves project within the reported pixel
    # error; tau large enough that internal nodes survive the fixpoint
    params = AdaptParams(tau=32.0, hysteresis=0.0)
    front = _fixpoint(ActiveFront.roots_only(tree), tree, cam, params)
    eye = np.array(cam.eye)
    fwd = np.array(cam.forward)
    up = np.array(cam.up)
    right = np.cross(fwd, up)
    scale = cam.viewport_height / (2.0 * math.tan(0.5 * cam.fov_y))

    def project(p):
        rel = p - eye
        d = float(rel @ fwd)
        if d <= cam.near:
            return None
        return np.array([float(rel @ right) / d, float(rel @ up) / d]) * scale

    checked = 0
    for nid in sorted(front.active):
        if nid < tree.leaf_count:
            continue
        err = screen_space_error(tree.node(nid), cam)
        if math.isinf(err):
            continue
        pn = project(tree.positions[nid])
        if pn is None:
            continue
        for leaf in tree.descendant_leaves(nid):
            pl = project(tree.positions[leaf])
            if pl is None:
                continue
            assert np.linalg.norm(pl - pn) <= err + 1e-6
            checked += 1
    assert checked > 0


# -- render set -------------------------------------------------------------------

def test_render_set_all_leaves_is_clean_face_set(tree, ico3):
    front = ActiveFront.all_leaves(tree)
    triangles = render_set(front, tree)
    expected = {tuple(sorted(f)) for f in cleanup(ico3).faces.tolist()}
    assert {tuple(sorted(t)) for t in triangles} == expected


def test_render_set_roots_only_empty_on_single_root(octa):
    # extend the greedy log until one vertex remains, giving a single root
    from meshforge import SimplifyState, build_tree as build
    result = simplify(octa, SimplifyConfig(target_faces=0))
    state = SimplifyState.from_mesh(octa)
    records = []
    for rec in result.records:
        records.append(state.contract(rec.removed_a, rec.removed_b,
                                      rec.position, rec.cost))
    while sum(state.alive) > 1:
        a, b = [v for v, ok in enumerate(state.alive) if ok][:2]
        mid = tuple(0.5 * (np.array(state.positions[a])
                           + np.array(state.positions[b])))
        records.append(state.contract(a, b, mid, 0.0))
    single = build(octa, records)
    assert len(single.roots) == 1
    front = ActiveFront.roots_only(single)
    assert render_set(front, single) == []


def test_render_set_matches_bruteforce_proxy_scan(tree, cam):
    params = AdaptParams(tau=4.0, hysteresis=0.1)
    front = ActiveFront.roots_only(tree)
    for _ in range(6):
        front = adapt(front, tree, cam, params)
    triangles = render_set(front, tree)
    # brute-force proxy: walk each leaf's parent chain to the active node
    proxy = {}
    for leaf in range(tree.leaf_count):
        node = leaf
        while node not in front.active:
            node = int(tree.parents[node])
        proxy[leaf] = node
    expected = set()
    for a, b, c in tree.faces.tolist():
        tri = (proxy[a], proxy[b], proxy[c])
        if len(set(tri)) == 3:
            expected.add(tuple(sorted(tri)))
    assert {tuple(sorted(t)) for t in triangles} == expected
    assert len(triangles) == len(expected)
    # deterministic sorted order
    keys = [tuple(sorted(t)) for t in triangles]
    assert keys == sorted(keys)


# -- flythrough --------------------------------------------------------------------

def test_flythrough_single_frame_equals_one_adapt(tree, cam):
    params = AdaptParams(tau=2.0)
    stats, front = flythrough(tree, [(0.0, cam)], params)
    expected = adapt(ActiveFront.roots_only(tree), tree, cam, params)
    assert len(stats) == 1
    assert front.active == expected.active
    assert stats[0].splits == expected.last_splits
    assert stats[0].triangles == len(render_set(expected, tree))


def test_flythrough_far_camera_large_tau_monotone_decrease(tree):
    cam = Camera.look_at((0, 0, 12), (0, 0, 0), viewport_height=720.0)
    params = AdaptParams(tau=64.0, hysteresis=0.5)
    start = ActiveFront.all_leaves(tree)
    path = [(float(i), cam) for i in range(40)]
    stats, _ = flythrough(tree, path, params, initial=start)
    counts = [s.triangles for s in stats]
    for a, b in zip(counts, counts[1:]):
        assert a >= b


def test_flythrough_zoom_in_grows_triangles(tree):
    path = []
    for i in range(40):
        z = 20.0 - i * 0.45
        path.append((float(i), Camera.look_at((0, 0, z), (0, 0, 0),
                                              viewport_height=1080.0)))
    params = AdaptParams(tau=1.0, hysteresis=0.25)
    stats, _ = flythrough(tree, path, params)
    assert stats[-1].triangles >= stats[0].triangles


def test_flythrough_csv_schema(tree, cam):
    from meshforge.view_dependent import FLYTHROUGH_CSV_HEADER
    params = AdaptParams(tau=2.0)
    stats, _ = flythrough(tree, [(0.0, cam), (1.0, cam)], params)
    assert FLYTHROUGH_CSV_HEADER == "frame,active,triangles,splits,merges,max_err_px"
    row = stats[0].csv_row()
    assert row.startswith("0,")
    assert len(row.split(",")) == 6
    assert "np." not in row  # plain decimal floats only
    float(row.split(",")[5])  # parses back


# -- camera path serialization ------------------------------------------------------

def test_camera_path_roundtrip(cam):
    path = [(0.0, cam), (1.0, Camera.look_at((5, 1, 2), (0, 0, 0)))]
    text = camera_path_to_json(path)
    parsed = load_camera_path(text)
    assert len(parsed) == 2
    assert parsed[0][1] == cam


def test_camera_path_rejects_bad_json():
    with pytest.raises(ValueError):
        load_camera_path("not json")
    with pytest.raises(ValueError):
        load_camera_path("[]")
    with pytest.raises(ValueError):
        load_camera_path('[{"eye": [0,0,0]}]')
