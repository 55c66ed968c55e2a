# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels.

Mirror of ``_fallback`` (same conventions, same formulas); see that module
for the packed-scene layout and kind codes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, sqrt

cnp.import_array()

DEF BOX = 0
DEF SPHERE = 1
DEF CAPSULE = 2
DEF CYLINDER = 3
DEF CONE = 4

DEF GOLDEN_STEPS = 80
cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0


cdef inline double _clamp(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef inline double _hypot2(double a, double b) nogil:
    return sqrt(a * a + b * b)


cdef inline void _to_local(const double* p, const double* pos, const double* rot,
                           double* out) nogil:
    # out = R^T (p - pos); rot is row-major 3x3
    cdef double d0 = p[0] - pos[0]
    cdef double d1 = p[1] - pos[1]
    cdef double d2 = p[2] - pos[2]
    out[0] = rot[0] * d0 + rot[3] * d1 + rot[6] * d2
    out[1] = rot[1] * d0 + rot[4] * d1 + rot[7] * d2
    out[2] = rot[2] * d0 + rot[5] * d1 + rot[8] * d2


cdef inline void _rot_apply(const double* rot, const double* v, double* out) nogil:
    out[0] = rot[0] * v[0] + rot[1] * v[1] + rot[2] * v[2]
    out[1] = rot[3] * v[0] + rot[4] * v[1] + rot[5] * v[2]
    out[2] = rot[6] * v[0] + rot[7] * v[1] + rot[8] * v[2]


cdef inline void _rot_apply_t(const double* rot, const double* v, double* out) nogil:
    out[0] = rot[0] * v[0] + rot[3] * v[1] + rot[6] * v[2]
    out[1] = rot[1] * v[0] + rot[4] * v[1] + rot[7] * v[2]
    out[2] = rot[2] * v[0] + rot[5] * v[1] + rot[8] * v[2]


cdef double _cone_distance(const double* pl, double r, double hh) nogil:
    cdef double rho = _hypot2(pl[0], pl[1])
    cdef double z = pl[2]
    cdef double ex, ez, t, d_base, d_slant
    if fabs(z) <= hh and rho <= r * (hh - z) / (2.0 * hh):
        return 0.0
    d_base = _hypot2(max(rho - r, 0.0), fabs(z + hh))
    ex = -r
    ez = 2.0 * hh
    t = _clamp(((rho - r) * ex + (z + hh) * ez) / (ex * ex + ez * ez), 0.0, 1.0)
    d_slant = _hypot2(rho - (r + t * ex), z - (-hh + t * ez))
    return min(d_base, d_slant)


cdef double _local_distance(const double* pl, int kind, const double* params) nogil:
    cdef double d0, d1, d2, r, hl, z, dr, dz
    if kind == BOX:
        d0 = max(fabs(pl[0]) - params[0], 0.0)
        d1 = max(fabs(pl[1]) - params[1], 0.0)
        d2 = max(fabs(pl[2]) - params[2], 0.0)
        return sqrt(d0 * d0 + d1 * d1 + d2 * d2)
    if kind == SPHERE:
        return max(sqrt(pl[0] * pl[0] + pl[1] * pl[1] + pl[2] * pl[2]) - params[0], 0.0)
    if kind == CAPSULE:
        r = params[0]
        hl = params[1]
        z = _clamp(pl[2], -hl, hl)
        d2 = pl[2] - z
        return max(sqrt(pl[0] * pl[0] + pl[1] * pl[1] + d2 * d2) - r, 0.0)
    if kind == CYLINDER:
        r = params[0]
        hl = params[1]
        dr = max(_hypot2(pl[0], pl[1]) - r, 0.0)
        dz = max(fabs(pl[2]) - hl, 0.0)
        return _hypot2(dr, dz)
    return _cone_distance(pl, params[0], params[1])


cdef bint _local_inside(const double* pl, int kind, const double* params) nogil:
    cdef double r, hl, hh, z, d2
    if kind == BOX:
        return (fabs(pl[0]) <= params[0] and fabs(pl[1]) <= params[1]
                and fabs(pl[2]) <= params[2])
    if kind == SPHERE:
        r = params[0]
        return pl[0] * pl[0] + pl[1] * pl[1] + pl[2] * pl[2] <= r * r
    if kind == CAPSULE:
        r = params[0]
        hl = params[1]
        z = _clamp(pl[2], -hl, hl)
        d2 = pl[2] - z
        return pl[0] * pl[0] + pl[1] * pl[1] + d2 * d2 <= r * r
    if kind == CYLINDER:
        r = params[0]
        hl = params[1]
        return fabs(pl[2]) <= hl and _hypot2(pl[0], pl[1]) <= r
    r = params[0]
    hh = params[1]
    if fabs(pl[2]) > hh:
        return False
    return _hypot2(pl[0], pl[1]) <= r * (hh - pl[2]) / (2.0 * hh)


cdef double _aabb_distance(const double* pl, const double* half) nogil:
    cdef double d0 = max(fabs(pl[0]) - half[0], 0.0)
    cdef double d1 = max(fabs(pl[1]) - half[1], 0.0)
    cdef double d2 = max(fabs(pl[2]) - half[2], 0.0)
    return sqrt(d0 * d0 + d1 * d1 + d2 * d2)


cdef double _segment_box_distance(const double* a, const double* b, const double* half,
                                  const double* pos, const double* rot) nogil:
    cdef double al[3]
    cdef double bl[3]
    cdef double q[3]
    cdef double lo = 0.0, hi = 1.0, c, d, fc, fd
    cdef int i, k
    _to_local(a, pos, rot, al)
    _to_local(b, pos, rot, bl)
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    for k in range(3):
        q[k] = al[k] + c * (bl[k] - al[k])
    fc = _aabb_distance(q, half)
    for k in range(3):
        q[k] = al[k] + d * (bl[k] - al[k])
    fd = _aabb_distance(q, half)
    for i in range(GOLDEN_STEPS):
        if fc < fd:
            hi = d
            d = c
            fd = fc
            c = hi - INV_PHI * (hi - lo)
            for k in range(3):
                q[k] = al[k] + c * (bl[k] - al[k])
            fc = _aabb_distance(q, half)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + INV_PHI * (hi - lo)
            for k in range(3):
                q[k] = al[k] + d * (bl[k] - al[k])
            fd = _aabb_distance(q, half)
    return min(fc, fd)


cdef bint _boxes_overlap(const double* half_a, const double* pos_a, const double* rot_a,
                         const double* half_b, const double* pos_b, const double* rot_b) nogil:
    cdef double t[3]
    cdef double axes[15][3]
    cdef double ax[3]
    cdef double n, ra, rb, dot
    cdef int i, j, k
    t[0] = pos_b[0] - pos_a[0]
    t[1] = pos_b[1] - pos_a[1]
    t[2] = pos_b[2] - pos_a[2]
    for k in range(3):
        for i in range(3):
            axes[k][i] = rot_a[i * 3 + k]      # column k of A
            axes[3 + k][i] = rot_b[i * 3 + k]  # column k of B
    for i in range(3):
        for j in range(3):
            axes[6 + i * 3 + j][0] = axes[i][1] * axes[3 + j][2] - axes[i][2] * axes[3 + j][1]
            axes[6 + i * 3 + j][1] = axes[i][2] * axes[3 + j][0] - axes[i][0] * axes[3 + j][2]
            axes[6 + i * 3 + j][2] = axes[i][0] * axes[3 + j][1] - axes[i][1] * axes[3 + j][0]
    for i in range(15):
        n = sqrt(axes[i][0] ** 2 + axes[i][1] ** 2 + axes[i][2] ** 2)
        if n < 1e-9:
            continue
        for k in range(3):
            ax[k] = axes[i][k] / n
        ra = 0.0
        rb = 0.0
        for k in range(3):
            dot = ax[0] * rot_a[0 * 3 + k] + ax[1] * rot_a[1 * 3 + k] + ax[2] * rot_a[2 * 3 + k]
            ra += half_a[k] * fabs(dot)
            dot = ax[0] * rot_b[0 * 3 + k] + ax[1] * rot_b[1 * 3 + k] + ax[2] * rot_b[2 * 3 + k]
            rb += half_b[k] * fabs(dot)
        if fabs(ax[0] * t[0] + ax[1] * t[1] + ax[2] * t[2]) > ra + rb:
            return False
    return True


cdef bint _link_hits_prim(int lkind, const double* lparams, const double* lpos,
                          const double* lrot, int okind, const double* oparams,
                          const double* opos, const double* orot) nogil:
    cdef double pl[3]
    cdef double cp[3]
    cdef double a[3]
    cdef double b[3]
    cdef double v[3]
    cdef double dist
    cdef int k
    if lkind == SPHERE:
        _to_local(lpos, opos, orot, pl)
        return _local_distance(pl, okind, oparams) <= lparams[0]
    if okind == BOX:
        return _boxes_overlap(lparams, lpos, lrot, oparams, opos, orot)
    if okind == SPHERE:
        _to_local(opos, lpos, lrot, pl)
        return _aabb_distance(pl, lparams) <= oparams[0]
    # curved obstacle vs box link: conservative capsule hull of the obstacle
    v[0] = 0.0
    v[1] = 0.0
    v[2] = -oparams[1]
    _rot_apply(orot, v, cp)
    for k in range(3):
        a[k] = opos[k] + cp[k]
        b[k] = opos[k] - cp[k]
    return _segment_box_distance(a, b, lparams, lpos, lrot) <= oparams[0]


def points_inside(const double[:, ::1] pts, const int[::1] kinds, const double[:, ::1] params,
                  const double[:, ::1] pos, const double[:, :, ::1] rot):
    cdef Py_ssize_t n_pts = pts.shape[0]
    cdef Py_ssize_t n_prims = kinds.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(n_pts, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    cdef double pl[3]
    cdef Py_ssize_t i, j
    with nogil:
        for j in range(n_pts):
            for i in range(n_prims):
                _to_local(&pts[j, 0], &pos[i, 0], &rot[i, 0, 0], pl)
                if _local_inside(pl, kinds[i], &params[i, 0]):
                    ov[j] = 1
                    break
    return out


def points_distance(const double[:, ::1] pts, const int[::1] kinds, const double[:, ::1] params,
                    const double[:, ::1] pos, const double[:, :, ::1] rot):
    cdef Py_ssize_t n_pts = pts.shape[0]
    cdef Py_ssize_t n_prims = kinds.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.full(n_pts, np.inf)
    cdef double[::1] ov = out
    cdef double pl[3]
    cdef double d
    cdef Py_ssize_t i, j
    with nogil:
        for j in range(n_pts):
            for i in range(n_prims):
                _to_local(&pts[j, 0], &pos[i, 0], &rot[i, 0, 0], pl)
                d = _local_distance(pl, kinds[i], &params[i, 0])
                if d < ov[j]:
                    ov[j] = d
                if ov[j] == 0.0:
                    break
    return out


def closest_point_box(const double[::1] p, const double[::1] half, const double[::1] pos,
                      const double[:, ::1] rot):
    cdef double pl[3]
    cdef double cpl[3]
    cdef double w[3]
    cdef double diff, dist2 = 0.0
    cdef int k
    _to_local(&p[0], &pos[0], &rot[0, 0], pl)
    for k in range(3):
        cpl[k] = _clamp(pl[k], -half[k], half[k])
        diff = pl[k] - cpl[k]
        dist2 += diff * diff
    _rot_apply(&rot[0, 0], cpl, w)
    out = np.empty(3)
    cdef double[::1] om = out
    for k in range(3):
        om[k] = pos[k] + w[k]
    return out, sqrt(dist2)


def first_collision(const int[::1] rkinds, const double[:, ::1] rparams, const double[::1] rbound,
                    const double[:, :, ::1] rpos, const double[:, :, :, ::1] rrot,
                    const int[::1] okinds, const double[:, ::1] oparams, const double[::1] obound,
                    const double[:, ::1] opos, const double[:, :, ::1] orot):
    cdef Py_ssize_t n_steps = rpos.shape[0]
    cdef Py_ssize_t n_links = rpos.shape[1]
    cdef Py_ssize_t n_obs = okinds.shape[0]
    cdef Py_ssize_t s, li, oi
    cdef double g0, g1, g2, rr
    cdef int hit = -1
    with nogil:
        for s in range(n_steps):
            for li in range(n_links):
                for oi in range(n_obs):
                    g0 = rpos[s, li, 0] - opos[oi, 0]
                    g1 = rpos[s, li, 1] - opos[oi, 1]
                    g2 = rpos[s, li, 2] - opos[oi, 2]
                    rr = rbound[li] + obound[oi]
                    if g0 * g0 + g1 * g1 + g2 * g2 > rr * rr:
                        continue
                    if _link_hits_prim(rkinds[li], &rparams[li, 0], &rpos[s, li, 0],
                                       &rrot[s, li, 0, 0], okinds[oi], &oparams[oi, 0],
                                       &opos[oi, 0], &orot[oi, 0, 0]):
                        hit = <int> s
                        break
                if hit >= 0:
                    break
            if hit >= 0:
                break
    return hit


cdef double _ray_box(const double* ol, const double* dl, const double* half,
                     double* n_local) nogil:
    cdef double tmin = -INFINITY, tmax = INFINITY
    cdef double t1, t2, lo, hi, sign = 1.0
    cdef int k, axis = -1
    for k in range(3):
        if fabs(dl[k]) < 1e-15:
            if fabs(ol[k]) > half[k]:
                return INFINITY
            continue
        t1 = (-half[k] - ol[k]) / dl[k]
        t2 = (half[k] - ol[k]) / dl[k]
        if t1 <= t2:
            lo = t1
            hi = t2
        else:
            lo = t2
            hi = t1
        if lo > tmin:
            tmin = lo
            axis = k
            sign = -1.0 if dl[k] > 0 else 1.0
        if hi < tmax:
            tmax = hi
        if tmin > tmax:
            return INFINITY
    if tmax < 0.0 or tmin < 0.0 or axis < 0:
        return INFINITY
    n_local[0] = 0.0
    n_local[1] = 0.0
    n_local[2] = 0.0
    n_local[axis] = sign
    return tmin


cdef double _ray_sphere_at(const double* ol, const double* dl, double r) nogil:
    cdef double b = ol[0] * dl[0] + ol[1] * dl[1] + ol[2] * dl[2]
    cdef double c = ol[0] * ol[0] + ol[1] * ol[1] + ol[2] * ol[2] - r * r
    cdef double disc = b * b - c
    cdef double t
    if disc < 0.0:
        return INFINITY
    t = -b - sqrt(disc)
    if t >= 0.0:
        return t
    return INFINITY


cdef double _ray_capsule(const double* ol, const double* dl, double r, double hl,
                         double* n_local) nogil:
    cdef double best = INFINITY
    cdef double a = dl[0] * dl[0] + dl[1] * dl[1]
    cdef double b = ol[0] * dl[0] + ol[1] * dl[1]
    cdef double c = ol[0] * ol[0] + ol[1] * ol[1] - r * r
    cdef double disc, t, z, zc
    cdef double oc[3]
    cdef int cap
    if a > 1e-15:
        disc = b * b - a * c
        if disc >= 0.0:
            t = (-b - sqrt(disc)) / a
            z = ol[2] + t * dl[2]
            if t >= 0.0 and fabs(z) <= hl:
                best = t
                n_local[0] = (ol[0] + t * dl[0]) / r
                n_local[1] = (ol[1] + t * dl[1]) / r
                n_local[2] = 0.0
    for cap in range(2):
        zc = -hl if cap == 0 else hl
        oc[0] = ol[0]
        oc[1] = ol[1]
        oc[2] = ol[2] - zc
        t = _ray_sphere_at(oc, dl, r)
        if t < best:
            z = oc[2] + t * dl[2]
            if (z >= 0.0) == (zc > 0.0) or z == 0.0:
                best = t
                n_local[0] = (oc[0] + t * dl[0]) / r
                n_local[1] = (oc[1] + t * dl[1]) / r
                n_local[2] = z / r
    return best


cdef double _ray_cylinder(const double* ol, const double* dl, double r, double hl,
                          double* n_local) nogil:
    cdef double best = INFINITY
    cdef double a = dl[0] * dl[0] + dl[1] * dl[1]
    cdef double b = ol[0] * dl[0] + ol[1] * dl[1]
    cdef double c = ol[0] * ol[0] + ol[1] * ol[1] - r * r
    cdef double disc, t, z, zc, x, y
    cdef int cap
    if a > 1e-15:
        disc = b * b - a * c
        if disc >= 0.0:
            t = (-b - sqrt(disc)) / a
            z = ol[2] + t * dl[2]
            if t >= 0.0 and fabs(z) <= hl:
                best = t
                n_local[0] = (ol[0] + t * dl[0]) / r
                n_local[1] = (ol[1] + t * dl[1]) / r
                n_local[2] = 0.0
    if fabs(dl[2]) > 1e-15:
        for cap in range(2):
            zc = -hl if cap == 0 else hl
            t = (zc - ol[2]) / dl[2]
            if 0.0 <= t < best:
                x = ol[0] + t * dl[0]
                y = ol[1] + t * dl[1]
                if x * x + y * y <= r * r:
                    best = t
                    n_local[0] = 0.0
                    n_local[1] = 0.0
                    n_local[2] = -1.0 if cap == 0 else 1.0
    return best


cdef double _ray_cone(const double* ol, const double* dl, double r, double hh,
                      double* n_local) nogil:
    cdef double best = INFINITY
    cdef double k2 = (r / (2.0 * hh)) ** 2
    cdef double a = dl[0] * dl[0] + dl[1] * dl[1] - k2 * dl[2] * dl[2]
    cdef double b = ol[0] * dl[0] + ol[1] * dl[1] + k2 * dl[2] * (hh - ol[2])
    cdef double c = ol[0] * ol[0] + ol[1] * ol[1] - k2 * (hh - ol[2]) ** 2
    cdef double cand[2]
    cdef int n_cand = 0, i
    cdef double disc, sq, t, z, nx, ny, nz, nn, x, y
    if fabs(a) > 1e-15:
        disc = b * b - a * c
        if disc >= 0.0:
            sq = sqrt(disc)
            cand[0] = (-b - sq) / a
            cand[1] = (-b + sq) / a
            if cand[1] < cand[0]:
                t = cand[0]
                cand[0] = cand[1]
                cand[1] = t
            n_cand = 2
    elif fabs(b) > 1e-15:
        cand[0] = -c / (2.0 * b)
        n_cand = 1
    for i in range(n_cand):
        t = cand[i]
        if t < 0.0 or t >= best:
            continue
        z = ol[2] + t * dl[2]
        if -hh <= z <= hh:
            nx = ol[0] + t * dl[0]
            ny = ol[1] + t * dl[1]
            nz = k2 * (hh - z)
            nn = sqrt(nx * nx + ny * ny + nz * nz)
            if nn > 0.0:
                best = t
                n_local[0] = nx / nn
                n_local[1] = ny / nn
                n_local[2] = nz / nn
                break
    if fabs(dl[2]) > 1e-15:
        t = (-hh - ol[2]) / dl[2]
        if 0.0 <= t < best:
            x = ol[0] + t * dl[0]
            y = ol[1] + t * dl[1]
            if x * x + y * y <= r * r:
                best = t
                n_local[0] = 0.0
                n_local[1] = 0.0
                n_local[2] = -1.0
    return best


def ray_scene(const double[::1] origin, const double[:, ::1] dirs, const int[::1] kinds,
              const double[:, ::1] params, const double[:, ::1] pos, const double[:, :, ::1] rot,
              double max_range):
    cdef Py_ssize_t n_rays = dirs.shape[0]
    cdef Py_ssize_t n_prims = kinds.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t_out = np.full(n_rays, np.inf)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] n_out = np.zeros((n_rays, 3))
    cdef double[::1] tv = t_out
    cdef double[:, ::1] nv = n_out
    cdef double ol[3]
    cdef double dl[3]
    cdef double nl[3]
    cdef double nw[3]
    cdef double t
    cdef int kind
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(n_prims):
            kind = kinds[i]
            _to_local(&origin[0], &pos[i, 0], &rot[i, 0, 0], ol)
            for j in range(n_rays):
                _rot_apply_t(&rot[i, 0, 0], &dirs[j, 0], dl)
                if kind == BOX:
                    t = _ray_box(ol, dl, &params[i, 0], nl)
                elif kind == SPHERE:
                    t = _ray_sphere_at(ol, dl, params[i, 0])
                    if t < INFINITY:
                        nl[0] = (ol[0] + t * dl[0]) / params[i, 0]
                        nl[1] = (ol[1] + t * dl[1]) / params[i, 0]
                        nl[2] = (ol[2] + t * dl[2]) / params[i, 0]
                elif kind == CAPSULE:
                    t = _ray_capsule(ol, dl, params[i, 0], params[i, 1], nl)
                elif kind == CYLINDER:
                    t = _ray_cylinder(ol, dl, params[i, 0], params[i, 1], nl)
                else:
                    t = _ray_cone(ol, dl, params[i, 0], params[i, 1], nl)
                if t < tv[j] and t <= max_range:
                    tv[j] = t
                    _rot_apply(&rot[i, 0, 0], nl, nw)
                    nv[j, 0] = nw[0]
                    nv[j, 1] = nw[1]
                    nv[j, 2] = nw[2]
    return t_out, n_out
