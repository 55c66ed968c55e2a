"""Obstacle and robot-body shapes, workspaces, and rigid-pose packing.

Primitives live in 2D or 3D workspaces; internally everything is embedded
in 3D (planar scenes at z = 0 with a fixed z half-extent on boxes) so the
kernels only ever see one representation. Positions handed to and returned
from the public API keep the workspace dimension.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import transforms as tf
from . import kernels

KIND_CODES = {
    "box": kernels.BOX,
    "sphere": kernels.SPHERE,
    "capsule": kernels.CAPSULE,
    "cylinder": kernels.CYLINDER,
    "cone": kernels.CONE,
}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}

# z half-extent used to embed planar boxes in 3D; any positive value works
# because planar queries stay at z = 0
PLANAR_HALF_DEPTH = 0.5

QUAT_TOL = 1e-9


def embed_point(p):
    """Lift a 2D/3D position to 3D (z = 0 padding)."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] == 3:
        return p
    pad = np.zeros(p.shape[:-1] + (3,))
    pad[..., :2] = p
    return pad


@dataclass(frozen=True)
class Primitive:
    """A solid shape with a world (or body-frame) pose.

    size semantics: box = half-extents (dim values); sphere = (radius,);
    capsule/cylinder = (radius, half_length); cone = (base_radius,
    half_height). Axis-symmetric kinds point along their local +z.
    """

    kind: str
    size: tuple
    pos: tuple
    quat: tuple = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.kind not in KIND_CODES:
            raise ValueError(f"unknown primitive kind {self.kind!r}")
        object.__setattr__(self, "size", tuple(float(s) for s in self.size))
        object.__setattr__(self, "pos", tuple(float(x) for x in self.pos))
        object.__setattr__(self, "quat", tuple(float(x) for x in self.quat))
        if any(s <= 0.0 for s in self.size):
            raise ValueError(f"primitive sizes must be positive, got {self.size}")
        if abs(np.linalg.norm(self.quat) - 1.0) > QUAT_TOL:
            raise ValueError("orientation quaternion must have unit norm")
        dim = len(self.pos)
        if dim not in (2, 3):
            raise ValueError("primitives live in 2D or 3D")
        if dim == 2 and self.kind not in ("box", "sphere"):
            raise ValueError(f"{self.kind} is 3D-only")

    @property
    def dim(self):
        return len(self.pos)

    def params3(self):
        """Packed (3,) size parameters in kernel layout."""
        out = np.zeros(3)
        if self.kind == "box":
            half = np.asarray(self.size, dtype=float)
            if self.dim == 2:
                out[:2] = half
                out[2] = PLANAR_HALF_DEPTH
            else:
                out[:] = half
        else:
            out[: len(self.size)] = self.size
        return out

    def pos3(self):
        return embed_point(np.asarray(self.pos, dtype=float))

    def rot3(self):
        return tf.quat_to_matrix(np.asarray(self.quat, dtype=float))

    def bounding_radius(self):
        if self.kind == "box":
            return float(np.linalg.norm(self.params3()))
        r = self.size[0]
        if self.kind == "sphere":
            return float(r)
        if self.kind == "capsule":
            return float(self.size[1] + r)
        # cylinder and cone both fit in sqrt(r^2 + h^2)
        return float(np.hypot(r, self.size[1]))

    def surface_measure(self):
        """Surface area (3D) or perimeter (2D boxes/disks)."""
        if self.dim == 2:
            if self.kind == "box":
                return 4.0 * (self.size[0] + self.size[1])
            return 2.0 * np.pi * self.size[0]
        if self.kind == "box":
            hx, hy, hz = self.size
            return 8.0 * (hx * hy + hy * hz + hx * hz)
        r = self.size[0]
        if self.kind == "sphere":
            return 4.0 * np.pi * r * r
        if self.kind == "capsule":
            return 2.0 * np.pi * r * (2.0 * self.size[1]) + 4.0 * np.pi * r * r
        if self.kind == "cylinder":
            return 2.0 * np.pi * r * (2.0 * self.size[1]) + 2.0 * np.pi * r * r
        h = 2.0 * self.size[1]
        return np.pi * r * np.hypot(r, h) + np.pi * r * r

    def volume_measure(self):
        """Volume (3D) or area (2D)."""
        if self.dim == 2:
            if self.kind == "box":
                return 4.0 * self.size[0] * self.size[1]
            return np.pi * self.size[0] ** 2
        if self.kind == "box":
            return 8.0 * self.size[0] * self.size[1] * self.size[2]
        r = self.size[0]
        if self.kind == "sphere":
            return 4.0 / 3.0 * np.pi * r ** 3
        if self.kind == "capsule":
            return np.pi * r * r * 2.0 * self.size[1] + 4.0 / 3.0 * np.pi * r ** 3
        if self.kind == "cylinder":
            return np.pi * r * r * 2.0 * self.size[1]
        return np.pi * r * r * 2.0 * self.size[1] / 3.0

    def to_dict(self):
        return {"kind": self.kind, "size": list(self.size),
                "pos": list(self.pos), "quat": list(self.quat)}

    @classmethod
    def from_dict(cls, d):
        return cls(kind=d["kind"], size=tuple(d["size"]), pos=tuple(d["pos"]),
                   quat=tuple(d.get("quat", (1.0, 0.0, 0.0, 0.0))))


def box2d(center, half_extents, angle=0.0):
    return Primitive("box", tuple(half_extents), tuple(center),
                     tuple(tf.quat_from_planar_angle(angle)))


def disk(center, radius):
    return Primitive("sphere", (radius,), tuple(center))


class PackedScene:
    """Kernel-layout arrays for a set of primitives."""

    __slots__ = ("kinds", "params", "pos", "rot", "bound", "n")

    def __init__(self, prims):
        self.n = len(prims)
        self.kinds = np.array([KIND_CODES[p.kind] for p in prims], dtype=np.int32)
        self.params = np.array([p.params3() for p in prims]).reshape(self.n, 3)
        self.pos = np.array([p.pos3() for p in prims]).reshape(self.n, 3)
        self.rot = np.array([p.rot3() for p in prims]).reshape(self.n, 3, 3)
        self.bound = np.array([p.bounding_radius() for p in prims])


class Workspace:
    """Immutable obstacle set with axis-aligned bounds.

    Default bounds are the unit square/cube centered at the origin.
    """

    def __init__(self, dim, primitives=(), lo=None, hi=None):
        if dim not in (2, 3):
            raise ValueError("workspace dimension must be 2 or 3")
        self.dim = dim
        self.primitives = tuple(primitives)
        for p in self.primitives:
            if p.dim != dim:
                raise ValueError("primitive dimension does not match workspace")
        self.lo = np.full(dim, -0.5) if lo is None else np.asarray(lo, dtype=float)
        self.hi = np.full(dim, 0.5) if hi is None else np.asarray(hi, dtype=float)
        if np.any(self.hi <= self.lo):
            raise ValueError("workspace bounds must satisfy lo < hi")
        self.packed = PackedScene(self.primitives)

    @property
    def n_obstacles(self):
        return len(self.primitives)

    def diameter(self):
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))

    def to_dict(self):
        return {
            "dim": self.dim,
            "bounds": {"lo": self.lo.tolist(), "hi": self.hi.tolist()},
            "primitives": [p.to_dict() for p in self.primitives],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            dim=int(d["dim"]),
            primitives=[Primitive.from_dict(p) for p in d["primitives"]],
            lo=d["bounds"]["lo"],
            hi=d["bounds"]["hi"],
        )


class DynamicWorkspace:
    """Workspace whose obstacles interpolate between two placements.

    ``at(t)`` returns the static snapshot at episode fraction t in [0, 1]:
    linear in position, shortest-arc spherical in orientation.
    """

    def __init__(self, dim, primitives, end_poses, lo=None, hi=None):
        self.start = Workspace(dim, primitives, lo=lo, hi=hi)
        if len(end_poses) != len(primitives):
            raise ValueError("one end pose per primitive required")
        self.end_poses = [(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
                          for p, q in end_poses]

    @property
    def dim(self):
        return self.start.dim

    def at(self, t):
        t = float(min(max(t, 0.0), 1.0))
        prims = []
        for prim, (pos_b, quat_b) in zip(self.start.primitives, self.end_poses):
            pos = (1.0 - t) * np.asarray(prim.pos) + t * pos_b
            quat = tf.quat_slerp(np.asarray(prim.quat), quat_b, t)
            prims.append(Primitive(prim.kind, prim.size, tuple(pos), tuple(quat)))
        return Workspace(self.dim, prims, lo=self.start.lo, hi=self.start.hi)

    def to_dict(self):
        d = self.start.to_dict()
        d["dynamic"] = True
        d["end_poses"] = [{"pos": p.tolist(), "quat": q.tolist()}
                          for p, q in self.end_poses]
        return d

    @classmethod
    def from_dict(cls, d):
        base = Workspace.from_dict(d)
        poses = [(e["pos"], e["quat"]) for e in d["end_poses"]]
        return cls(base.dim, base.primitives, poses, lo=base.lo, hi=base.hi)


def workspace_from_dict(d):
    if d.get("dynamic"):
        return DynamicWorkspace.from_dict(d)
    return Workspace.from_dict(d)


@dataclass(frozen=True)
class Body:
    """Rigid robot body: links fixed in the body frame."""

    links: tuple
    name: str = "body"
    packed: PackedScene = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.links:
            raise ValueError("a body needs at least one link")
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "packed", PackedScene(self.links))

    @property
    def dim(self):
        return self.links[0].dim

    def radius(self):
        """Radius of the bounding sphere around the body origin."""
        return max(float(np.linalg.norm(l.pos3())) + l.bounding_radius()
                   for l in self.links)


def sphere_robot(radius, dim):
    """Disk (2D) or sphere (3D) robot centered at the body origin."""
    return Body((Primitive("sphere", (radius,), (0.0,) * dim),), name="sphere")


# S-shape link dimensions: three bars and two connectors, smallest
# dimension 0.05; slot widths elsewhere scale off this value
S_BAR_HALF = (0.10, 0.025, 0.025)
S_CONN_HALF = (0.025, 0.025, 0.05)
S_SMALLEST_LINK = 0.05


def s_shape_body():
    """Five-box S-shaped rigid body in the xz-plane of its body frame.

    Three 0.20 x 0.05 x 0.05 bars at z in {+0.10, 0, -0.10} joined by two
    0.05 x 0.05 x 0.10 connectors on alternating ends.
    """
    links = (
        Primitive("box", S_BAR_HALF, (0.0, 0.0, 0.10)),
        Primitive("box", S_CONN_HALF, (-0.075, 0.0, 0.05)),
        Primitive("box", S_BAR_HALF, (0.0, 0.0, 0.0)),
        Primitive("box", S_CONN_HALF, (0.075, 0.0, -0.05)),
        Primitive("box", S_BAR_HALF, (0.0, 0.0, -0.10)),
    )
    return Body(links, name="s_shape")


def inflate_body(body, margin):
    """Body grown by `margin` in every direction (conservative cover).

    Planning against the inflated body guarantees the true body clears
    obstacles anywhere within `margin` of a checked configuration, which
    makes planned paths robust to re-discretization.
    """
    if margin <= 0:
        return body
    links = []
    for l in body.links:
        if l.kind == "box":
            size = tuple(s + margin for s in l.size)
        else:
            size = (l.size[0] + margin,) + tuple(l.size[1:])
        links.append(Primitive(l.kind, size, l.pos, l.quat))
    return Body(tuple(links), name=body.name)


def make_body(name, dim, sphere_radius=0.03):
    if name == "sphere":
        return sphere_robot(sphere_radius, dim)
    if name == "s_shape":
        if dim != 3:
            raise ValueError("the S-shape body is 3D-only")
        return s_shape_body()
    raise ValueError(f"unknown body {name!r}")


def config_pose(q, dim):
    """(pos3, rot3x3) world pose of a configuration array.

    Configurations are either a plain translation (length = dim) or a
    translation plus unit quaternion [x, y, z, qw, qx, qy, qz].
    """
    q = np.asarray(q, dtype=float)
    if q.shape[-1] == dim:
        return embed_point(q), np.eye(3)
    if q.shape[-1] == 7 and dim == 3:
        return q[:3].copy(), tf.quat_to_matrix(q[3:])
    raise ValueError(f"bad configuration of length {q.shape[-1]} for dim {dim}")


def posed_links(body, configs, dim):
    """World link poses for a batch of configurations.

    Returns (pos [S, L, 3], rot [S, L, 3, 3]) for S configurations.
    """
    configs = np.atleast_2d(np.asarray(configs, dtype=float))
    n_steps = configs.shape[0]
    n_links = body.packed.n
    if configs.shape[1] == dim:
        base = embed_point(configs)
        pos = base[:, None, :] + body.packed.pos[None, :, :]
        rot = np.broadcast_to(body.packed.rot, (n_steps, n_links, 3, 3))
        return np.ascontiguousarray(pos), np.ascontiguousarray(rot)
    if configs.shape[1] != 7 or dim != 3:
        raise ValueError(f"bad configuration width {configs.shape[1]} for dim {dim}")
    body_rot = tf.quats_to_matrices(configs[:, 3:])          # [S, 3, 3]
    pos = configs[:, None, :3] + np.einsum("sij,lj->sli", body_rot,
                                           body.packed.pos)
    rot = np.einsum("sij,ljk->slik", body_rot, body.packed.rot)
    return np.ascontiguousarray(pos), np.ascontiguousarray(rot)
