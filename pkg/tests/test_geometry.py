import numpy as np
import pytest

from pointplan import transforms as tf
from pointplan.geometry import (
    Primitive,
    Workspace,
    box2d,
    closest_point_box,
    collide,
    disk,
    fibonacci_directions,
    membership,
    min_distance,
    rasterize,
    ray_cast,
    sample_interior,
    sample_surface,
    sentinel_point,
    sphere_robot,
    s_shape_body,
    workspace_from_dict,
    UnsupportedRepresentationError,
)
from oracles import (
    bisect_ray_distance,
    brute_box_surface_distance,
    mc_collision_verdict,
    random_primitive,
)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


# ---------------------------------------------------------------- closest point

def test_closest_point_center_is_interior():
    box = Primitive("box", (0.2, 0.3, 0.1), (0.1, -0.2, 0.0))
    cp, d = closest_point_box(np.array([0.1, -0.2, 0.0]), box)
    assert d == 0.0
    assert np.allclose(cp, [0.1, -0.2, 0.0])


def test_closest_point_face_projection():
    box = Primitive("box", (0.5, 0.5, 0.5), (0.5, 0.5, 0.5))  # unit box [0,1]^3
    cp, d = closest_point_box(np.array([2.0, 0.5, 0.5]), box)
    assert np.allclose(cp, [1.0, 0.5, 0.5], atol=1e-12)
    assert np.isclose(d, 1.0)


def test_closest_point_matches_surface_sampling_oracle(rng):
    for _ in range(10):
        box = random_primitive(rng, 3, kinds=("box",))
        p = rng.uniform(-0.8, 0.8, size=3)
        _, d = closest_point_box(p, box)
        if d < 1e-6:
            continue  # interior: oracle samples the surface only
        brute = brute_box_surface_distance(p, box, rng)
        assert abs(d - brute) < 1e-3


# ---------------------------------------------------------------- collide

def test_sphere_inside_box_collides():
    ws = Workspace(3, [Primitive("box", (0.2, 0.2, 0.2), (0.0, 0.0, 0.0))])
    assert collide(sphere_robot(0.05, 3), np.zeros(3), ws)


def test_sphere_clear_of_box_is_free():
    ws = Workspace(2, [box2d((0.0, 0.0), (0.1, 0.1))])
    # gap of 1.0 - 0.1 - 0.5 = 0.4 > 0: free
    assert not collide(sphere_robot(0.5, 2), np.array([1.1, 0.0]), ws)
    assert collide(sphere_robot(0.5, 2), np.array([0.55, 0.0]), ws)


def test_touching_counts_as_collision():
    ws = Workspace(2, [box2d((0.0, 0.0), (0.1, 0.1))])
    assert collide(sphere_robot(0.1, 2), np.array([0.2, 0.0]), ws)


@pytest.mark.parametrize("body_name", ["sphere", "s_shape"])
def test_collide_agrees_with_membership_oracle(rng, body_name):
    body = sphere_robot(0.06, 3) if body_name == "sphere" else s_shape_body()
    checked = 0
    for _ in range(150):
        prims = [random_primitive(rng, 3) for _ in range(3)]
        ws = Workspace(3, prims)
        q = rng.uniform(-0.5, 0.5, size=3)
        verdict = mc_collision_verdict(body, q, ws, rng, pts_per_link=4000)
        if verdict == "marginal":
            continue
        got = collide(body, q, ws)
        # conservative capsule hulls may call near-miss box/curved pairs
        # early; treat a disagreement as real only for non-curved scenes
        if got and verdict == "free" and body_name == "s_shape" and any(
                p.kind in ("capsule", "cylinder", "cone") for p in prims):
            d = float(min_distance(ws, np.atleast_2d(
                np.concatenate([q, np.zeros(0)])))[0])
            assert d < 0.25  # hull slack is bounded by the primitive size
            continue
        assert got == (verdict == "collide"), (body_name, q, verdict)
        checked += 1
    assert checked > 60


def test_collide_invariant_under_rigid_transforms(rng):
    body = s_shape_body()
    agree = 0
    for _ in range(200):
        prims = [random_primitive(rng, 3, kinds=("box", "sphere")) for _ in range(3)]
        ws = Workspace(3, prims, lo=[-2] * 3, hi=[2] * 3)
        q = np.concatenate([rng.uniform(-0.4, 0.4, size=3), tf.random_quat(rng)])
        base = collide(body, q, ws)

        shift = rng.uniform(-0.5, 0.5, size=3)
        rq = tf.random_quat(rng)
        rmat = tf.quat_to_matrix(rq)
        moved = [Primitive(p.kind, p.size, tuple(rmat @ p.pos3() + shift),
                           tuple(tf.quat_multiply(rq, np.asarray(p.quat))))
                 for p in prims]
        ws2 = Workspace(3, moved, lo=[-4] * 3, hi=[4] * 3)
        q2 = np.concatenate([rmat @ q[:3] + shift, tf.quat_multiply(rq, q[3:])])
        assert collide(body, q2, ws2) == base
        agree += 1
    assert agree == 200


# ---------------------------------------------------------------- ray casting

def test_ray_slab_hit():
    ws = Workspace(3, [Primitive("box", (0.5, 1.0, 1.0), (2.5, 0.0, 0.0))],
                   lo=[-3] * 3, hi=[3] * 3)
    hit = ray_cast(np.zeros(3), np.array([1.0, 0.0, 0.0]), ws)
    assert np.allclose(hit.point, [2.0, 0.0, 0.0], atol=1e-12)
    assert np.allclose(hit.normal, [-1.0, 0.0, 0.0])
    assert np.isclose(hit.distance, 2.0)


def test_ray_miss_returns_none():
    ws = Workspace(2, [box2d((0.3, 0.0), (0.05, 0.05))])
    assert ray_cast(np.array([0.0, 0.3]), np.array([-1.0, 0.0]), ws) is None


def test_ray_requires_unit_direction():
    ws = Workspace(2, [box2d((0.3, 0.0), (0.05, 0.05))])
    with pytest.raises(ValueError):
        ray_cast(np.zeros(2), np.array([2.0, 0.0]), ws)


def test_ray_origin_inside_convention():
    ws = Workspace(2, [box2d((0.0, 0.0), (0.2, 0.2))])
    d = np.array([0.0, 1.0])
    hit = ray_cast(np.zeros(2), d, ws)
    assert hit.distance == 0.0
    assert np.allclose(hit.normal, -d)


def test_ray_matches_bisection_oracle(rng):
    checked = 0
    for _ in range(150):
        prims = [random_primitive(rng, 3) for _ in range(3)]
        ws = Workspace(3, prims)
        origin = rng.uniform(-0.5, 0.5, size=3)
        if membership(ws, origin[None, :])[0]:
            continue
        # aim near a primitive so most rays actually hit something
        target = np.asarray(prims[rng.integers(3)].pos) + rng.normal(size=3) * 0.05
        d = target - origin
        if np.linalg.norm(d) < 1e-6:
            continue
        d /= np.linalg.norm(d)
        hit = ray_cast(origin, d, ws)
        oracle = bisect_ray_distance(origin, d, ws)
        if oracle is None or oracle < 2e-3:
            continue  # grazing or sub-scan feature: oracle blind spot
        assert hit is not None
        assert abs(hit.distance - oracle) < 1e-4
        checked += 1
    assert checked > 30


def test_ray_hits_lie_on_surface_with_opposing_normals(rng):
    for _ in range(40):
        prims = [random_primitive(rng, 3) for _ in range(3)]
        ws = Workspace(3, prims)
        origin = rng.uniform(-0.5, 0.5, size=3)
        if membership(ws, origin[None, :])[0]:
            continue
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        hit = ray_cast(origin, d, ws)
        if hit is None:
            continue
        assert min_distance(ws, hit.point[None, :])[0] <= 1e-6
        assert float(hit.normal @ d) <= 1e-9
        assert membership(ws, (hit.point - 1e-4 * hit.normal)[None, :])[0]
        assert not membership(ws, (hit.point + 1e-4 * hit.normal)[None, :])[0]


# ------------------------------------------------------------- surface sampling

def test_square_perimeter_samples(rng):
    ws = Workspace(2, [box2d((0.0, 0.0), (0.2, 0.2))])
    pts, nrm = sample_surface(ws, 500, rng)
    on_perimeter = np.isclose(np.abs(pts).max(axis=1), 0.2, atol=1e-12)
    assert on_perimeter.all()
    units = np.concatenate([np.eye(2), -np.eye(2)])
    assert all(any(np.allclose(v, u) for u in units) for v in nrm)


def test_single_sample(rng):
    ws = Workspace(2, [box2d((0.1, 0.1), (0.05, 0.05))])
    pts, nrm = sample_surface(ws, 1, rng)
    assert pts.shape == (1, 2)
    assert np.isclose(np.linalg.norm(nrm[0]), 1.0)


def test_area_proportional_allocation(rng):
    # perimeters 0.8 and 2.4: first box expects 1/4 of the samples
    ws = Workspace(2, [box2d((-0.3, 0.0), (0.1, 0.1)),
                       box2d((0.2, 0.0), (0.15, 0.45))])
    n = 4000
    pts, _ = sample_surface(ws, n, rng)
    near_first = pts[:, 0] < -0.05
    count = int(near_first.sum())
    sigma = np.sqrt(n * 0.25 * 0.75)
    assert abs(count - n * 0.25) < 3 * sigma


def test_surface_normals_point_outward(rng):
    # single-primitive workspaces; samples in hairline edge bands (for
    # example the cone base rim) may step through the opposite face, so the
    # inward check tolerates a sub-percent edge fraction
    for _ in range(20):
        ws = Workspace(3, [random_primitive(rng, 3)])
        pts, nrm = sample_surface(ws, 300, rng)
        assert not membership(ws, pts + 1e-4 * nrm).any()
        assert membership(ws, pts - 1e-4 * nrm).mean() >= 0.995


def test_surface_normals_union_mostly_outward(rng):
    # overlapping obstacles may swallow a sample of a buried surface, so
    # the union property is only a strong majority
    for _ in range(10):
        ws = Workspace(3, [random_primitive(rng, 3) for _ in range(2)])
        pts, nrm = sample_surface(ws, 200, rng)
        assert membership(ws, pts - 1e-4 * nrm).mean() > 0.95


def test_empty_workspace_sentinel(rng):
    ws = Workspace(2)
    pts, nrm = sample_surface(ws, 5, rng)
    sp, sn = sentinel_point(ws)
    assert np.allclose(pts, sp)
    assert np.allclose(nrm, 0.0)


# ------------------------------------------------------------ interior sampling

def test_interior_points_are_members(rng):
    for dim in (2, 3):
        kinds = ("box", "sphere") if dim == 2 else ("box", "sphere", "capsule",
                                                    "cylinder", "cone")
        prims = [random_primitive(rng, dim, kinds=kinds) for _ in range(3)]
        ws = Workspace(dim, prims)
        pts = sample_interior(ws, 400, rng)
        assert membership(ws, pts).all()


def test_interior_mean_near_box_center(rng):
    center = np.array([0.1, -0.2])
    half = np.array([0.2, 0.1])
    ws = Workspace(2, [box2d(center, half)])
    n = 20000
    pts = sample_interior(ws, n, rng)
    sigma = half / np.sqrt(3.0) / np.sqrt(n)
    assert np.all(np.abs(pts.mean(axis=0) - center) < 3 * sigma)


def test_interior_zero_count(rng):
    ws = Workspace(2, [box2d((0, 0), (0.1, 0.1))])
    assert sample_interior(ws, 0, rng).shape == (0, 2)


# ------------------------------------------------------------------- directions

def test_directions_unit_norm():
    for dim in (2, 3):
        d = fibonacci_directions(64, dim)
        assert np.allclose(np.linalg.norm(d, axis=1), 1.0, atol=1e-9)


def test_four_directions_2d():
    d = fibonacci_directions(4, 2)
    expected = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert np.allclose(d, expected, atol=1e-12)


def test_sphere_spacing_near_ideal():
    m = 256
    d = fibonacci_directions(m, 3)
    dots = np.clip(d @ d.T, -1.0, 1.0)
    np.fill_diagonal(dots, -1.0)
    nn_angle = np.arccos(dots.max(axis=1))
    ideal = np.sqrt(4 * np.pi / m)
    assert np.all(nn_angle > 0.5 * ideal)
    assert np.all(nn_angle < 2.0 * ideal)


# -------------------------------------------------------------------- rasterize

def test_rasterize_empty_and_full():
    assert rasterize(Workspace(2), 16).sum() == 0
    full = Workspace(2, [box2d((0.0, 0.0), (0.6, 0.6))])
    assert rasterize(full, 16).min() == 1.0


def test_rasterize_halfplane_fraction():
    res = 64
    ws = Workspace(2, [box2d((-0.25, 0.0), (0.25, 0.5))])  # left half occupied
    img = rasterize(ws, res)
    assert abs(img.mean() - 0.5) <= 2.0 / res


def test_rasterize_rejects_3d():
    with pytest.raises(UnsupportedRepresentationError):
        rasterize(Workspace(3), 8)


# ------------------------------------------------------------------ persistence

def test_workspace_round_trip(rng):
    prims = [random_primitive(rng, 3) for _ in range(4)]
    ws = Workspace(3, prims, lo=[-1, -1, -0.5], hi=[1, 1, 0.5])
    d = ws.to_dict()
    back = workspace_from_dict(d)
    assert back.to_dict() == d


def test_primitive_validation():
    with pytest.raises(ValueError):
        Primitive("box", (0.1, -0.1), (0.0, 0.0))
    with pytest.raises(ValueError):
        Primitive("box", (0.1, 0.1), (0.0, 0.0), (1.0, 0.1, 0.0, 0.0))
    with pytest.raises(ValueError):
        Primitive("capsule", (0.1, 0.1), (0.0, 0.0))  # 3D-only kind in 2D
    with pytest.raises(ValueError):
        Primitive("wedge", (0.1,), (0.0, 0.0, 0.0))


def test_body_radius_covers_links():
    body = s_shape_body()
    assert body.dim == 3
    r = body.radius()
    # farthest link corner: bottom bar at |z|=0.125, |x|=0.1
    assert r >= np.linalg.norm([0.1, 0.025, 0.125]) - 1e-12


def test_disk_helper():
    d = disk((0.1, 0.2), 0.05)
    assert d.kind == "sphere" and d.dim == 2
