"""Pure-numpy geometry kernels.

Reference implementation of the hot queries; the Cython module
``_compiled`` mirrors these semantics exactly. Scenes are packed arrays
(see ``pointplan.geometry.primitives``): per primitive a kind code, three
size parameters, a world position, a world rotation matrix and a bounding
radius. Everything is 3D; planar scenes are embedded at z = 0 with a unit
z extent so that in-plane queries are unchanged.

Kind codes / size parameters:
  box      0  (hx, hy, hz) half-extents
  sphere   1  (r, -, -)
  capsule  2  (r, hl, -)   axis +-z, segment z in [-hl, hl]
  cylinder 3  (r, hl, -)   axis +-z, caps at z = +-hl
  cone     4  (r, hh, -)   base disk (radius r) at z = -hh, apex at z = +hh

Convention is closed: points on a surface count as inside, touching
counts as collision.
"""

import numpy as np

BOX, SPHERE, CAPSULE, CYLINDER, CONE = 0, 1, 2, 3, 4

# golden-section steps for segment/box distance; interval shrinks by
# 0.618^N so 80 steps put the parameter error far below 1e-12
_GOLDEN_STEPS = 80
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def _to_local(p, pos, rot):
    return rot.T @ (p - pos)


def _local_distance(pl, kind, params):
    """Exterior distance from a local-frame point to the solid primitive."""
    if kind == BOX:
        d = np.abs(pl) - params
        return float(np.linalg.norm(np.maximum(d, 0.0)))
    if kind == SPHERE:
        return max(float(np.linalg.norm(pl)) - params[0], 0.0)
    if kind == CAPSULE:
        r, hl = params[0], params[1]
        z = min(max(pl[2], -hl), hl)
        return max(float(np.sqrt(pl[0] ** 2 + pl[1] ** 2 + (pl[2] - z) ** 2)) - r, 0.0)
    if kind == CYLINDER:
        r, hl = params[0], params[1]
        dr = max(float(np.hypot(pl[0], pl[1])) - r, 0.0)
        dz = max(abs(pl[2]) - hl, 0.0)
        return float(np.hypot(dr, dz))
    if kind == CONE:
        return _cone_distance(pl, params[0], params[1])
    raise ValueError(f"unknown primitive kind {kind}")


def _cone_distance(pl, r, hh):
    # exterior distance to the solid cone = distance to the revolved
    # triangle apex (0, hh) - rim (r, -hh) - base center (0, -hh) in the
    # (radius, z) half-plane
    rho = float(np.hypot(pl[0], pl[1]))
    z = float(pl[2])
    if abs(z) <= hh and rho <= r * (hh - z) / (2.0 * hh):
        return 0.0
    d_base = float(np.hypot(max(rho - r, 0.0), abs(z + hh)))
    ex, ez = -r, 2.0 * hh  # rim -> apex edge
    t = ((rho - r) * ex + (z + hh) * ez) / (ex * ex + ez * ez)
    t = min(max(t, 0.0), 1.0)
    d_slant = float(np.hypot(rho - (r + t * ex), z - (-hh + t * ez)))
    return min(d_base, d_slant)


def _local_inside(pl, kind, params):
    if kind == BOX:
        return bool(np.all(np.abs(pl) <= params))
    if kind == SPHERE:
        return float(np.linalg.norm(pl)) <= params[0]
    if kind == CAPSULE:
        r, hl = params[0], params[1]
        z = min(max(pl[2], -hl), hl)
        return pl[0] ** 2 + pl[1] ** 2 + (pl[2] - z) ** 2 <= r * r
    if kind == CYLINDER:
        r, hl = params[0], params[1]
        return abs(pl[2]) <= hl and np.hypot(pl[0], pl[1]) <= r
    if kind == CONE:
        r, hh = params[0], params[1]
        if abs(pl[2]) > hh:
            return False
        return np.hypot(pl[0], pl[1]) <= r * (hh - pl[2]) / (2.0 * hh)
    raise ValueError(f"unknown primitive kind {kind}")


def points_inside(pts, kinds, params, pos, rot):
    """Closed membership of each point in the union of primitives -> uint8[K]."""
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(len(pts), dtype=np.uint8)
    for i in range(len(kinds)):
        todo = out == 0
        if not todo.any():
            break
        local = (pts[todo] - pos[i]) @ rot[i]
        k = int(kinds[i])
        if k == BOX:
            hit = np.all(np.abs(local) <= params[i], axis=1)
        elif k == SPHERE:
            hit = np.einsum("ij,ij->i", local, local) <= params[i, 0] ** 2
        elif k == CAPSULE:
            r, hl = params[i, 0], params[i, 1]
            z = np.clip(local[:, 2], -hl, hl)
            hit = local[:, 0] ** 2 + local[:, 1] ** 2 + (local[:, 2] - z) ** 2 <= r * r
        elif k == CYLINDER:
            r, hl = params[i, 0], params[i, 1]
            hit = (np.abs(local[:, 2]) <= hl) & (np.hypot(local[:, 0], local[:, 1]) <= r)
        elif k == CONE:
            r, hh = params[i, 0], params[i, 1]
            rad = r * (hh - local[:, 2]) / (2.0 * hh)
            hit = (np.abs(local[:, 2]) <= hh) & (np.hypot(local[:, 0], local[:, 1]) <= rad)
        else:
            raise ValueError(f"unknown primitive kind {k}")
        idx = np.flatnonzero(todo)
        out[idx[hit]] = 1
    return out


def points_distance(pts, kinds, params, pos, rot):
    """Exterior distance of each point to the union (0 inside) -> f64[K]."""
    pts = np.asarray(pts, dtype=float)
    out = np.full(len(pts), np.inf)
    for i in range(len(kinds)):
        local = (pts - pos[i]) @ rot[i]
        k = int(kinds[i])
        if k == BOX:
            d = np.abs(local) - params[i]
            di = np.linalg.norm(np.maximum(d, 0.0), axis=1)
        elif k == SPHERE:
            di = np.maximum(np.linalg.norm(local, axis=1) - params[i, 0], 0.0)
        elif k == CAPSULE:
            r, hl = params[i, 0], params[i, 1]
            z = np.clip(local[:, 2], -hl, hl)
            seg = np.sqrt(local[:, 0] ** 2 + local[:, 1] ** 2 + (local[:, 2] - z) ** 2)
            di = np.maximum(seg - r, 0.0)
        elif k == CYLINDER:
            r, hl = params[i, 0], params[i, 1]
            dr = np.maximum(np.hypot(local[:, 0], local[:, 1]) - r, 0.0)
            dz = np.maximum(np.abs(local[:, 2]) - hl, 0.0)
            di = np.hypot(dr, dz)
        elif k == CONE:
            r, hh = params[i, 0], params[i, 1]
            rho = np.hypot(local[:, 0], local[:, 1])
            z = local[:, 2]
            d_base = np.hypot(np.maximum(rho - r, 0.0), np.abs(z + hh))
            ex, ez = -r, 2.0 * hh
            t = np.clip(((rho - r) * ex + (z + hh) * ez) / (ex * ex + ez * ez), 0.0, 1.0)
            d_slant = np.hypot(rho - (r + t * ex), z - (-hh + t * ez))
            di = np.minimum(d_base, d_slant)
            inside = (np.abs(z) <= hh) & (rho <= r * (hh - z) / (2.0 * hh))
            di[inside] = 0.0
        else:
            raise ValueError(f"unknown primitive kind {k}")
        np.minimum(out, di, out=out)
    return out


def closest_point_box(p, half, pos, rot):
    """Nearest point of a solid oriented box to p, and its distance."""
    pl = _to_local(np.asarray(p, dtype=float), pos, rot)
    cp_local = np.clip(pl, -half, half)
    dist = float(np.linalg.norm(pl - cp_local))
    return pos + rot @ cp_local, dist


def _segment_box_distance(a, b, half, pos, rot):
    # distance from segment [a, b] to a solid box; the distance along the
    # segment is convex, so golden-section search is exact in the limit
    al = _to_local(a, pos, rot)
    bl = _to_local(b, pos, rot)

    def f(t):
        q = al + t * (bl - al)
        d = np.abs(q) - half
        return float(np.linalg.norm(np.maximum(d, 0.0)))

    lo, hi = 0.0, 1.0
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(_GOLDEN_STEPS):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return min(fc, fd)


def _boxes_overlap(half_a, pos_a, rot_a, half_b, pos_b, rot_b):
    # separating-axis test; face axes of both boxes plus the nine edge
    # cross products, skipping near-degenerate axes (|axis| < 1e-9)
    t = pos_b - pos_a
    axes = [rot_a[:, k] for k in range(3)] + [rot_b[:, k] for k in range(3)]
    for i in range(3):
        for j in range(3):
            axes.append(np.cross(rot_a[:, i], rot_b[:, j]))
    for axis in axes:
        n = np.linalg.norm(axis)
        if n < 1e-9:
            continue
        axis = axis / n
        ra = float(np.sum(half_a * np.abs(axis @ rot_a)))
        rb = float(np.sum(half_b * np.abs(axis @ rot_b)))
        if abs(float(axis @ t)) > ra + rb:
            return False
    return True


def _link_hits_prim(lkind, lparams, lpos, lrot, okind, oparams, opos, orot):
    """Collision between one robot link (box or sphere) and one obstacle."""
    if lkind == SPHERE:
        pl = _to_local(lpos, opos, orot)
        return _local_distance(pl, okind, oparams) <= lparams[0]
    if okind == BOX:
        return _boxes_overlap(lparams, lpos, lrot, oparams, opos, orot)
    if okind == SPHERE:
        _, dist = closest_point_box(opos, lparams, lpos, lrot)
        return dist <= oparams[0]
    # curved obstacle vs box link: conservative capsule hull of the
    # obstacle (cylinder as capsule, cone as apex-to-base-center capsule)
    r, h = oparams[0], oparams[1]
    a = opos + orot @ np.array([0.0, 0.0, -h])
    b = opos + orot @ np.array([0.0, 0.0, h])
    return _segment_box_distance(a, b, lparams, lpos, lrot) <= r


def first_collision(rkinds, rparams, rbound, rpos, rrot,
                    okinds, oparams, obound, opos, orot):
    """Index of the first colliding robot pose in a pose sequence, or -1.

    rpos/rrot hold world poses of each link for each of S candidate
    configurations; obstacles are static over the sequence.
    """
    n_steps, n_links = rpos.shape[0], rpos.shape[1]
    for s in range(n_steps):
        for li in range(n_links):
            lp = rpos[s, li]
            for oi in range(len(okinds)):
                gap = lp - opos[oi]
                if float(gap @ gap) > (rbound[li] + obound[oi]) ** 2:
                    continue
                if _link_hits_prim(int(rkinds[li]), rparams[li], lp, rrot[s, li],
                                   int(okinds[oi]), oparams[oi], opos[oi], orot[oi]):
                    return s
    return -1


def _ray_box(ol, dl, half):
    tmin, tmax = -np.inf, np.inf
    axis, sign = -1, 1.0
    for k in range(3):
        if abs(dl[k]) < 1e-15:
            if abs(ol[k]) > half[k]:
                return np.inf, -1, 1.0
            continue
        t1 = (-half[k] - ol[k]) / dl[k]
        t2 = (half[k] - ol[k]) / dl[k]
        lo, hi = (t1, t2) if t1 <= t2 else (t2, t1)
        if lo > tmin:
            tmin, axis, sign = lo, k, -np.sign(dl[k])
        tmax = min(tmax, hi)
        if tmin > tmax:
            return np.inf, -1, 1.0
    if tmax < 0.0 or tmin < 0.0 or axis < 0:
        return np.inf, -1, 1.0
    return tmin, axis, sign


def _ray_sphere(ol, dl, r):
    b = float(ol @ dl)
    c = float(ol @ ol) - r * r
    disc = b * b - c
    if disc < 0.0:
        return np.inf
    t = -b - np.sqrt(disc)
    return t if t >= 0.0 else np.inf


def _ray_capsule(ol, dl, r, hl):
    best_t, best_n = np.inf, None
    a = dl[0] ** 2 + dl[1] ** 2
    b = ol[0] * dl[0] + ol[1] * dl[1]
    c = ol[0] ** 2 + ol[1] ** 2 - r * r
    if a > 1e-15:
        disc = b * b - a * c
        if disc >= 0.0:
            t = (-b - np.sqrt(disc)) / a
            z = ol[2] + t * dl[2]
            if t >= 0.0 and abs(z) <= hl:
                best_t = t
                best_n = np.array([ol[0] + t * dl[0], ol[1] + t * dl[1], 0.0]) / r
    for zc in (-hl, hl):
        oc = ol - np.array([0.0, 0.0, zc])
        t = _ray_sphere(oc, dl, r)
        if t < best_t:
            p = oc + t * dl
            if p[2] * np.sign(zc) >= 0.0:  # outer hemisphere only
                best_t = t
                best_n = p / r
    return best_t, best_n


def _ray_cylinder(ol, dl, r, hl):
    best_t, best_n = np.inf, None
    a = dl[0] ** 2 + dl[1] ** 2
    b = ol[0] * dl[0] + ol[1] * dl[1]
    c = ol[0] ** 2 + ol[1] ** 2 - r * r
    if a > 1e-15:
        disc = b * b - a * c
        if disc >= 0.0:
            t = (-b - np.sqrt(disc)) / a
            z = ol[2] + t * dl[2]
            if t >= 0.0 and abs(z) <= hl:
                best_t = t
                best_n = np.array([ol[0] + t * dl[0], ol[1] + t * dl[1], 0.0]) / r
    if abs(dl[2]) > 1e-15:
        for zc, nz in ((-hl, -1.0), (hl, 1.0)):
            t = (zc - ol[2]) / dl[2]
            if 0.0 <= t < best_t:
                x, y = ol[0] + t * dl[0], ol[1] + t * dl[1]
                if x * x + y * y <= r * r:
                    best_t = t
                    best_n = np.array([0.0, 0.0, nz])
    return best_t, best_n


def _ray_cone(ol, dl, r, hh):
    best_t, best_n = np.inf, None
    k2 = (r / (2.0 * hh)) ** 2
    a = dl[0] ** 2 + dl[1] ** 2 - k2 * dl[2] ** 2
    b = ol[0] * dl[0] + ol[1] * dl[1] + k2 * dl[2] * (hh - ol[2])
    c = ol[0] ** 2 + ol[1] ** 2 - k2 * (hh - ol[2]) ** 2
    cands = []
    if abs(a) > 1e-15:
        disc = b * b - a * c
        if disc >= 0.0:
            sq = np.sqrt(disc)
            cands = [(-b - sq) / a, (-b + sq) / a]
    elif abs(b) > 1e-15:
        cands = [-c / (2.0 * b)]
    for t in sorted(cands):
        if t < 0.0 or t >= best_t:
            continue
        z = ol[2] + t * dl[2]
        if -hh <= z <= hh:
            n = np.array([ol[0] + t * dl[0], ol[1] + t * dl[1], k2 * (hh - z)])
            nn = np.linalg.norm(n)
            if nn > 0.0:
                best_t = t
                best_n = n / nn
                break
    if abs(dl[2]) > 1e-15:
        t = (-hh - ol[2]) / dl[2]
        if 0.0 <= t < best_t:
            x, y = ol[0] + t * dl[0], ol[1] + t * dl[1]
            if x * x + y * y <= r * r:
                best_t = t
                best_n = np.array([0.0, 0.0, -1.0])
    return best_t, best_n


def ray_scene(origin, dirs, kinds, params, pos, rot, max_range):
    """Nearest hit of each ray against the scene.

    Returns (t[M], normals[M, 3]) with t = +inf on a miss. Assumes the
    origin lies outside every primitive (callers test membership first).
    """
    origin = np.asarray(origin, dtype=float)
    dirs = np.asarray(dirs, dtype=float)
    m = len(dirs)
    best_t = np.full(m, np.inf)
    normals = np.zeros((m, 3))
    for i in range(len(kinds)):
        k = int(kinds[i])
        ol0 = rot[i].T @ (origin - pos[i])
        for j in range(m):
            dl = rot[i].T @ dirs[j]
            if k == BOX:
                t, axis, sign = _ray_box(ol0, dl, params[i])
                if t < best_t[j] and t <= max_range:
                    best_t[j] = t
                    n = np.zeros(3)
                    n[axis] = sign
                    normals[j] = rot[i] @ n
                continue
            if k == SPHERE:
                t = _ray_sphere(ol0, dl, params[i, 0])
                if t < best_t[j] and t <= max_range:
                    best_t[j] = t
                    normals[j] = rot[i] @ ((ol0 + t * dl) / params[i, 0])
                continue
            if k == CAPSULE:
                t, n = _ray_capsule(ol0, dl, params[i, 0], params[i, 1])
            elif k == CYLINDER:
                t, n = _ray_cylinder(ol0, dl, params[i, 0], params[i, 1])
            elif k == CONE:
                t, n = _ray_cone(ol0, dl, params[i, 0], params[i, 1])
            else:
                raise ValueError(f"unknown primitive kind {k}")
            if t < best_t[j] and t <= max_range:
                best_t[j] = t
                normals[j] = rot[i] @ n
    return best_t, normals
