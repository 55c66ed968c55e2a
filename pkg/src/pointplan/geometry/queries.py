"""Collision predicates, ray casting, and obstacle-surface sampling."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .primitives import embed_point, posed_links


class UnsupportedRepresentationError(ValueError):
    """Raised when an observation mode does not apply to the workspace."""


@dataclass(frozen=True)
class RayHit:
    point: np.ndarray
    normal: np.ndarray
    distance: float


def membership(ws, points):
    """Closed membership of world points in the obstacle union -> bool[K]."""
    pts = np.ascontiguousarray(embed_point(np.atleast_2d(points)))
    if ws.packed.n == 0:
        return np.zeros(len(pts), dtype=bool)
    s = ws.packed
    return kernels.points_inside(pts, s.kinds, s.params, s.pos, s.rot).astype(bool)


def min_distance(ws, points):
    """Exterior distance of world points to the obstacle union (0 inside)."""
    pts = np.ascontiguousarray(embed_point(np.atleast_2d(points)))
    if ws.packed.n == 0:
        return np.full(len(pts), np.inf)
    s = ws.packed
    return kernels.points_distance(pts, s.kinds, s.params, s.pos, s.rot)


def closest_point_box(p, box):
    """Nearest point of a solid box primitive to p, with its distance."""
    if box.kind != "box":
        raise ValueError("closest_point_box needs a box primitive")
    p3 = np.ascontiguousarray(embed_point(np.asarray(p, dtype=float)))
    cp, dist = kernels.closest_point_box(
        p3, np.ascontiguousarray(box.params3()),
        np.ascontiguousarray(box.pos3()), np.ascontiguousarray(box.rot3()))
    return np.asarray(cp)[: box.dim], float(dist)


def collide(body, q, ws):
    """True iff any posed robot link touches any obstacle (closed test)."""
    return first_colliding(body, np.atleast_2d(q), ws) >= 0


def first_colliding(body, configs, ws):
    """Index of the first colliding configuration in a sequence, or -1."""
    if ws.packed.n == 0:
        return -1
    pos, rot = posed_links(body, configs, ws.dim)
    b, s = body.packed, ws.packed
    return int(kernels.first_collision(b.kinds, b.params, b.bound, pos, rot,
                                       s.kinds, s.params, s.bound, s.pos, s.rot))


def cast_rays(origin, dirs, ws, max_range=None):
    """Batch ray cast from one origin.

    Returns (t[M], normals[M, dim]); t = +inf marks a miss. An origin
    inside an obstacle yields t = 0 and normal = -dir for every ray.
    """
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    m = len(dirs)
    if max_range is None:
        max_range = ws.diameter()
    if ws.packed.n == 0:
        return np.full(m, np.inf), np.zeros((m, ws.dim))
    if membership(ws, np.atleast_2d(origin))[0]:
        return np.zeros(m), -dirs
    s = ws.packed
    t, normals = kernels.ray_scene(
        np.ascontiguousarray(embed_point(np.asarray(origin, dtype=float))),
        np.ascontiguousarray(embed_point(dirs)),
        s.kinds, s.params, s.pos, s.rot, float(max_range))
    return np.asarray(t), np.asarray(normals)[:, : ws.dim]


def ray_cast(origin, direction, ws, max_range=None):
    """Nearest obstacle hit along a unit-direction ray, or None."""
    direction = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
        raise ValueError("ray direction must be a unit vector")
    t, normals = cast_rays(origin, direction[None, :], ws, max_range=max_range)
    if not np.isfinite(t[0]):
        return None
    point = np.asarray(origin, dtype=float) + t[0] * direction
    return RayHit(point=point, normal=normals[0], distance=float(t[0]))


def sentinel_point(ws):
    """Placeholder oriented point for empty observations.

    Sits at +max-range along the x-axis with the only permitted zero
    normal.
    """
    p = np.zeros(ws.dim)
    p[0] = ws.diameter()
    return p, np.zeros(ws.dim)


def _unit_sphere(rng, k):
    v = rng.normal(size=(k, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _surface_box2d(prim, k, rng):
    hx, hy = prim.size
    edges = np.array([2 * hx, 2 * hx, 2 * hy, 2 * hy])
    which = rng.choice(4, size=k, p=edges / edges.sum())
    u = rng.uniform(-1.0, 1.0, size=k)
    pts = np.zeros((k, 3))
    nrm = np.zeros((k, 3))
    for e, (axis, side) in enumerate([(1, 1.0), (1, -1.0), (0, 1.0), (0, -1.0)]):
        m = which == e
        along = 1 - axis
        pts[m, along] = u[m] * (hx if along == 0 else hy)
        pts[m, axis] = side * (hy if axis == 1 else hx)
        nrm[m, axis] = side
    return pts, nrm


def _surface_box3d(prim, k, rng):
    h = np.asarray(prim.size)
    areas = np.array([h[1] * h[2], h[1] * h[2], h[0] * h[2],
                      h[0] * h[2], h[0] * h[1], h[0] * h[1]])
    which = rng.choice(6, size=k, p=areas / areas.sum())
    u = rng.uniform(-1.0, 1.0, size=(k, 2))
    pts = np.zeros((k, 3))
    nrm = np.zeros((k, 3))
    for f in range(6):
        axis, side = f // 2, 1.0 if f % 2 == 0 else -1.0
        m = which == f
        others = [a for a in range(3) if a != axis]
        pts[np.ix_(m, others)] = u[m] * h[others]
        pts[m, axis] = side * h[axis]
        nrm[m, axis] = side
    return pts, nrm


def _surface_sphere(prim, k, rng, dim):
    r = prim.size[0]
    if dim == 2:
        a = rng.uniform(0.0, 2 * np.pi, size=k)
        n = np.stack([np.cos(a), np.sin(a), np.zeros(k)], axis=1)
    else:
        n = _unit_sphere(rng, k)
    return r * n, n


def _surface_capsule(prim, k, rng):
    r, hl = prim.size
    side_area = 2 * np.pi * r * 2 * hl
    cap_area = 4 * np.pi * r * r
    on_side = rng.random(k) < side_area / (side_area + cap_area)
    pts = np.zeros((k, 3))
    nrm = np.zeros((k, 3))
    ks = int(on_side.sum())
    a = rng.uniform(0.0, 2 * np.pi, size=ks)
    z = rng.uniform(-hl, hl, size=ks)
    nrm[on_side] = np.stack([np.cos(a), np.sin(a), np.zeros(ks)], axis=1)
    pts[on_side] = nrm[on_side] * r + np.stack([np.zeros(ks)] * 2 + [z], axis=1)
    kc = k - ks
    u = _unit_sphere(rng, kc)
    centers = np.where(u[:, 2:3] >= 0, hl, -hl)
    nrm[~on_side] = u
    pts[~on_side] = u * r
    pts[~on_side, 2] += centers[:, 0]
    return pts, nrm


def _surface_cylinder(prim, k, rng):
    r, hl = prim.size
    side_area = 2 * np.pi * r * 2 * hl
    disk_area = np.pi * r * r
    which = rng.choice(3, size=k, p=np.array([side_area, disk_area, disk_area])
                       / (side_area + 2 * disk_area))
    pts = np.zeros((k, 3))
    nrm = np.zeros((k, 3))
    m = which == 0
    a = rng.uniform(0.0, 2 * np.pi, size=int(m.sum()))
    nrm[m] = np.stack([np.cos(a), np.sin(a), np.zeros(len(a))], axis=1)
    pts[m] = nrm[m] * r
    pts[m, 2] = rng.uniform(-hl, hl, size=int(m.sum()))
    for w, side in ((1, 1.0), (2, -1.0)):
        m = which == w
        km = int(m.sum())
        a = rng.uniform(0.0, 2 * np.pi, size=km)
        rad = r * np.sqrt(rng.random(km))
        pts[m] = np.stack([rad * np.cos(a), rad * np.sin(a),
                           np.full(km, side * hl)], axis=1)
        nrm[m, 2] = side
    return pts, nrm


def _surface_cone(prim, k, rng):
    r, hh = prim.size
    slant = np.hypot(r, 2 * hh)
    lat_area = np.pi * r * slant
    base_area = np.pi * r * r
    on_lat = rng.random(k) < lat_area / (lat_area + base_area)
    pts = np.zeros((k, 3))
    nrm = np.zeros((k, 3))
    kl = int(on_lat.sum())
    a = rng.uniform(0.0, 2 * np.pi, size=kl)
    s = np.sqrt(rng.random(kl))  # area grows with distance from apex
    rho = s * r
    pts[on_lat] = np.stack([rho * np.cos(a), rho * np.sin(a), hh - 2 * hh * s], axis=1)
    nl = np.stack([2 * hh * np.cos(a), 2 * hh * np.sin(a), np.full(kl, r)], axis=1)
    nrm[on_lat] = nl / np.linalg.norm(nl, axis=1, keepdims=True)
    kb = k - kl
    a = rng.uniform(0.0, 2 * np.pi, size=kb)
    rad = r * np.sqrt(rng.random(kb))
    pts[~on_lat] = np.stack([rad * np.cos(a), rad * np.sin(a),
                             np.full(kb, -hh)], axis=1)
    nrm[~on_lat, 2] = -1.0
    return pts, nrm


def _sample_prim_surface(prim, k, rng, dim):
    if prim.kind == "box":
        if dim == 2:
            return _surface_box2d(prim, k, rng)
        return _surface_box3d(prim, k, rng)
    if prim.kind == "sphere":
        return _surface_sphere(prim, k, rng, dim)
    if prim.kind == "capsule":
        return _surface_capsule(prim, k, rng)
    if prim.kind == "cylinder":
        return _surface_cylinder(prim, k, rng)
    return _surface_cone(prim, k, rng)


def sample_surface(ws, n, rng):
    """n oriented points on the obstacle surfaces, area-proportional.

    Returns (points[n, dim], normals[n, dim]) in world coordinates; an
    empty workspace yields n sentinel points.
    """
    if n < 1:
        raise ValueError("need n >= 1 surface samples")
    if ws.packed.n == 0:
        p, nv = sentinel_point(ws)
        return np.tile(p, (n, 1)), np.tile(nv, (n, 1))
    weights = np.array([p.surface_measure() for p in ws.primitives])
    which = rng.choice(ws.packed.n, size=n, p=weights / weights.sum())
    pts = np.empty((n, 3))
    nrm = np.empty((n, 3))
    for i, prim in enumerate(ws.primitives):
        m = which == i
        k = int(m.sum())
        if k == 0:
            continue
        pl, nl = _sample_prim_surface(prim, k, rng, ws.dim)
        rot = prim.rot3()
        pts[m] = prim.pos3() + pl @ rot.T
        nrm[m] = nl @ rot.T
    return pts[:, : ws.dim], nrm[:, : ws.dim]


def _sample_prim_interior(prim, k, rng, dim):
    if prim.kind == "box":
        h = prim.params3()
        pts = rng.uniform(-1.0, 1.0, size=(k, 3)) * h
        if dim == 2:
            pts[:, 2] = 0.0
        return pts
    r = prim.size[0]
    if prim.kind == "sphere":
        if dim == 2:
            a = rng.uniform(0.0, 2 * np.pi, size=k)
            rad = r * np.sqrt(rng.random(k))
            return np.stack([rad * np.cos(a), rad * np.sin(a), np.zeros(k)], axis=1)
        return _unit_sphere(rng, k) * (r * rng.random(k)[:, None] ** (1 / 3))
    if prim.kind == "cylinder":
        hl = prim.size[1]
        a = rng.uniform(0.0, 2 * np.pi, size=k)
        rad = r * np.sqrt(rng.random(k))
        return np.stack([rad * np.cos(a), rad * np.sin(a),
                         rng.uniform(-hl, hl, size=k)], axis=1)
    # capsule / cone: rejection inside the bounding cylinder
    h = prim.size[1] + (r if prim.kind == "capsule" else 0.0)
    out = np.empty((k, 3))
    filled = 0
    from . import kernels as _k
    kinds = np.array([_k.CAPSULE if prim.kind == "capsule" else _k.CONE], dtype=np.int32)
    params = np.ascontiguousarray(prim.params3()[None, :])
    zero3 = np.zeros((1, 3))
    eye = np.eye(3)[None, :, :]
    while filled < k:
        batch = max(2 * (k - filled), 16)
        a = rng.uniform(0.0, 2 * np.pi, size=batch)
        rad = r * np.sqrt(rng.random(batch))
        cand = np.stack([rad * np.cos(a), rad * np.sin(a),
                         rng.uniform(-h, h, size=batch)], axis=1)
        ok = _k.points_inside(np.ascontiguousarray(cand), kinds, params, zero3, eye)
        cand = cand[ok.astype(bool)]
        take = min(len(cand), k - filled)
        out[filled:filled + take] = cand[:take]
        filled += take
    return out


def sample_interior(ws, n, rng):
    """n points inside the obstacles, volume-proportional across them."""
    if n == 0:
        return np.zeros((0, ws.dim))
    if ws.packed.n == 0:
        p, _ = sentinel_point(ws)
        return np.tile(p, (n, 1))
    weights = np.array([p.volume_measure() for p in ws.primitives])
    which = rng.choice(ws.packed.n, size=n, p=weights / weights.sum())
    pts = np.empty((n, 3))
    for i, prim in enumerate(ws.primitives):
        m = which == i
        k = int(m.sum())
        if k == 0:
            continue
        pl = _sample_prim_interior(prim, k, rng, ws.dim)
        pts[m] = prim.pos3() + pl @ prim.rot3().T
    return pts[:, : ws.dim]


def fibonacci_directions(m, dim):
    """m near-evenly spaced unit directions (circle in 2D, sphere in 3D)."""
    if m < 1:
        raise ValueError("need m >= 1 directions")
    if dim == 2:
        a = 2 * np.pi * np.arange(m) / m
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    k = np.arange(m)
    z = 1.0 - (2.0 * k + 1.0) / m
    golden = np.pi * (3.0 - np.sqrt(5.0))
    rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([rho * np.cos(golden * k), rho * np.sin(golden * k), z], axis=1)


def rasterize(ws, resolution):
    """Occupancy image of a 2D workspace; cell = 1 iff its center is inside
    an obstacle. Row index follows y, column index follows x."""
    if ws.dim != 2:
        raise UnsupportedRepresentationError("occupancy images are 2D-only")
    centers = (np.arange(resolution) + 0.5) / resolution
    xs = ws.lo[0] + centers * (ws.hi[0] - ws.lo[0])
    ys = ws.lo[1] + centers * (ws.hi[1] - ws.lo[1])
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    occ = membership(ws, pts)
    return occ.reshape(resolution, resolution).astype(np.float64)
