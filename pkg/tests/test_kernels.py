"""Backend parity: the Cython kernels must match the numpy fallback."""

import numpy as np
import pytest

from pointplan.geometry import PackedScene, Workspace, posed_links, sphere_robot, s_shape_body
from pointplan.geometry import kernels
from oracles import random_primitive

pytestmark = pytest.mark.skipif(
    kernels.BACKEND != "compiled",
    reason="compiled kernel backend unavailable; parity has nothing to compare",
)


@pytest.fixture
def backends():
    return kernels.get_backend("python"), kernels.get_backend("compiled")


def random_scene(rng, dim, n_prims=5):
    kinds = ("box", "sphere") if dim == 2 else ("box", "sphere", "capsule",
                                                "cylinder", "cone")
    prims = [random_primitive(rng, dim, kinds=kinds) for _ in range(n_prims)]
    return PackedScene(prims)


def contig(scene):
    return (scene.kinds, np.ascontiguousarray(scene.params),
            np.ascontiguousarray(scene.pos), np.ascontiguousarray(scene.rot))


def test_points_inside_parity(backends):
    py, cy = backends
    rng = np.random.default_rng(7)
    for dim in (2, 3):
        for _ in range(20):
            s = random_scene(rng, dim)
            kinds, params, pos, rot = contig(s)
            pts = np.ascontiguousarray(
                np.c_[rng.uniform(-0.6, 0.6, size=(400, dim)),
                      np.zeros((400, 3 - dim))])
            a = py.points_inside(pts, kinds, params, pos, rot)
            b = cy.points_inside(pts, kinds, params, pos, rot)
            assert np.array_equal(a, b)


def test_points_distance_parity(backends):
    py, cy = backends
    rng = np.random.default_rng(8)
    for _ in range(20):
        s = random_scene(rng, 3)
        kinds, params, pos, rot = contig(s)
        pts = np.ascontiguousarray(rng.uniform(-0.7, 0.7, size=(300, 3)))
        a = py.points_distance(pts, kinds, params, pos, rot)
        b = cy.points_distance(pts, kinds, params, pos, rot)
        assert np.allclose(a, b, atol=1e-12)


def test_closest_point_box_parity(backends):
    py, cy = backends
    rng = np.random.default_rng(9)
    for _ in range(50):
        box = random_primitive(rng, 3, kinds=("box",))
        p = np.ascontiguousarray(rng.uniform(-0.8, 0.8, size=3))
        half = np.ascontiguousarray(box.params3())
        pos = np.ascontiguousarray(box.pos3())
        rot = np.ascontiguousarray(box.rot3())
        cpa, da = py.closest_point_box(p, half, pos, rot)
        cpb, db = cy.closest_point_box(p, half, pos, rot)
        assert np.allclose(cpa, cpb, atol=1e-12)
        assert abs(da - db) < 1e-12


def test_first_collision_parity(backends):
    py, cy = backends
    rng = np.random.default_rng(10)
    bodies = [sphere_robot(0.05, 3), s_shape_body()]
    for trial in range(60):
        body = bodies[trial % 2]
        prims = [random_primitive(rng, 3) for _ in range(4)]
        ws = Workspace(3, prims)
        configs = rng.uniform(-0.5, 0.5, size=(8, 3))
        pos, rot = posed_links(body, configs, 3)
        b, s = body.packed, ws.packed
        args = (b.kinds, np.ascontiguousarray(b.params), b.bound,
                pos, rot, s.kinds, np.ascontiguousarray(s.params), s.bound,
                np.ascontiguousarray(s.pos), np.ascontiguousarray(s.rot))
        assert py.first_collision(*args) == cy.first_collision(*args)


def test_ray_scene_parity(backends):
    py, cy = backends
    rng = np.random.default_rng(11)
    for _ in range(15):
        s = random_scene(rng, 3, n_prims=4)
        kinds, params, pos, rot = contig(s)
        origin = np.ascontiguousarray(rng.uniform(-0.6, 0.6, size=3))
        dirs = rng.normal(size=(64, 3))
        dirs = np.ascontiguousarray(dirs / np.linalg.norm(dirs, axis=1, keepdims=True))
        ta, na = py.ray_scene(origin, dirs, kinds, params, pos, rot, 10.0)
        tb, nb = cy.ray_scene(origin, dirs, kinds, params, pos, rot, 10.0)
        both_hit = np.isfinite(ta) & np.isfinite(tb)
        assert np.array_equal(np.isfinite(ta), np.isfinite(tb))
        assert np.allclose(ta[both_hit], tb[both_hit], atol=1e-10)
        assert np.allclose(na[both_hit], nb[both_hit], atol=1e-9)


def test_backend_module_reports_name():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
