import numpy as np
import pytest

from pointplan.envs import ConfigSpace, gen_2d_narrow, sample_free
from pointplan.geometry import Workspace, box2d, sphere_robot
from pointplan.planners import (
    PlanResult,
    birrt,
    rediscretize,
    shortcut,
    validate_path,
)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def setup_2d():
    return ConfigSpace(2), sphere_robot(0.03, 2)


def test_empty_workspace_quick_connect(rng):
    cs, body = setup_2d()
    ws = Workspace(2)
    res = birrt(ws, body, cs, np.array([-0.25, 0.0]), np.array([0.25, 0.0]),
                rng, budget=1000, edge_len=0.15, shortcut_iters=0)
    assert res.success
    assert res.nodes_expanded <= 20
    assert np.allclose(res.path[0], [-0.25, 0.0])
    assert np.allclose(res.path[-1], [0.25, 0.0], atol=1e-9)


def test_birrt_rejects_colliding_endpoints(rng):
    cs, body = setup_2d()
    ws = Workspace(2, [box2d((0.0, 0.0), (0.1, 0.1))])
    with pytest.raises(ValueError):
        birrt(ws, body, cs, np.zeros(2), np.array([0.4, 0.0]), rng)


def test_birrt_solves_narrow_scenes(rng):
    cs, body = setup_2d()
    solved = 0
    for _ in range(20):
        ws = gen_2d_narrow(rng)
        q0 = sample_free(ws, body, cs, rng)
        qg = sample_free(ws, body, cs, rng)
        res = birrt(ws, body, cs, q0, qg, rng, budget=50_000, edge_len=0.15)
        if res.success:
            solved += 1
            assert validate_path(ws, body, cs, res.path)
            assert np.allclose(res.path[0], q0)
            assert cs.distance(res.path[-1], qg) <= 1e-6
            steps = [cs.distance(res.path[i], res.path[i + 1])
                     for i in range(len(res.path) - 1)]
            assert max(steps) <= 0.15 + 1e-9
    assert solved == 20


def test_birrt_failure_returns_budget(rng):
    cs, body = setup_2d()
    # goal sealed inside a box ring: unreachable
    ring = [box2d((0.25, 0.0), (0.02, 0.25)), box2d((-0.25, 0.0), (0.02, 0.25)),
            box2d((0.0, 0.25), (0.25, 0.02)), box2d((0.0, -0.25), (0.25, 0.02))]
    ws = Workspace(2, ring)
    res = birrt(ws, body, cs, np.array([0.0, 0.0]), np.array([0.45, 0.45]),
                rng, budget=3000, edge_len=0.15)
    assert not res.success
    assert res.nodes_expanded >= 3000
    assert res.path.shape[0] == 0


def test_birrt_deterministic(rng):
    cs, body = setup_2d()
    ws = gen_2d_narrow(np.random.default_rng(3))
    q0 = sample_free(ws, body, cs, np.random.default_rng(4))
    qg = sample_free(ws, body, cs, np.random.default_rng(5))
    r1 = birrt(ws, body, cs, q0, qg, np.random.default_rng(42), budget=50_000)
    r2 = birrt(ws, body, cs, q0, qg, np.random.default_rng(42), budget=50_000)
    assert r1.success == r2.success
    assert r1.nodes_expanded == r2.nodes_expanded
    assert np.array_equal(r1.path, r2.path)


def test_shortcut_straight_path_unchanged(rng):
    cs, body = setup_2d()
    ws = Workspace(2)
    path = [np.array([x, 0.0]) for x in np.linspace(-0.3, 0.3, 7)]
    out, checks = shortcut(ws, body, cs, path, 50, rng)
    base = sum(cs.distance(path[i], path[i + 1]) for i in range(len(path) - 1))
    new = sum(cs.distance(out[i], out[i + 1]) for i in range(len(out) - 1))
    assert np.isclose(new, base)
    assert checks > 0


def test_shortcut_cuts_right_angle(rng):
    cs, body = setup_2d()
    ws = Workspace(2)
    leg1 = [np.array([0.0, y]) for y in np.linspace(0.0, 0.4, 5)]
    leg2 = [np.array([x, 0.4]) for x in np.linspace(0.1, 0.4, 4)]
    path = leg1 + leg2
    out, _ = shortcut(ws, body, cs, path, 200, rng)
    new = sum(cs.distance(out[i], out[i + 1]) for i in range(len(out) - 1))
    direct = cs.distance(path[0], path[-1])
    assert new <= 1.05 * direct


def test_shortcut_monotone_and_collision_free(rng):
    cs, body = setup_2d()
    for _ in range(10):
        ws = gen_2d_narrow(rng)
        q0 = sample_free(ws, body, cs, rng)
        qg = sample_free(ws, body, cs, rng)
        res = birrt(ws, body, cs, q0, qg, rng, budget=50_000,
                    shortcut_iters=0)
        if not res.success:
            continue
        base_len = res.path_length
        out, _ = shortcut(ws, body, cs, list(res.path), 100, rng)
        new_len = sum(cs.distance(out[i], out[i + 1])
                      for i in range(len(out) - 1))
        assert new_len <= base_len + 1e-9
        assert validate_path(ws, body, cs, out)


def test_rediscretize_spacing(rng):
    cs, _ = setup_2d()
    path = [np.array([0.0, 0.0]), np.array([0.5, 0.0]), np.array([0.5, 0.33])]
    out = rediscretize(path, cs, 0.15)
    steps = [cs.distance(out[i], out[i + 1]) for i in range(len(out) - 1)]
    assert max(steps) <= 0.15 + 1e-12
    assert np.allclose(out[0], path[0])
    assert np.allclose(out[-1], path[-1])


def test_plan_result_row():
    res = PlanResult(path=np.zeros((0, 2)), nodes_expanded=5, success=False)
    assert res.as_row() == {"success": False, "nodes": 5, "path_length": 0.0}
