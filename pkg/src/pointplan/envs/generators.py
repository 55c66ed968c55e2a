"""Procedural workspace generators and problem sampling.

Each environment family bundles a workspace sampler with a start/goal
sampler. Workspaces are unit squares/cubes centered at the origin.
"""

from dataclasses import dataclass

import numpy as np

from .. import transforms as tf
from ..geometry import (
    DynamicWorkspace,
    Primitive,
    Workspace,
    box2d,
    collide,
    S_SMALLEST_LINK,
)

WALL_THICKNESS = 0.05
SPHERE_ROBOT_RADIUS_2D = 0.03
SPHERE_ROBOT_RADIUS_3D = 0.05


class SamplingSaturationError(RuntimeError):
    """Rejection sampling exhausted its budget (pathologically full scene)."""


def sample_free(ws, body, cspace, rng, max_tries=10_000, accept=None):
    """Rejection-sample a collision-free configuration."""
    for _ in range(max_tries):
        q = cspace.sample(rng, ws.lo, ws.hi)
        if accept is not None and not accept(q):
            continue
        if not collide(body, q, ws):
            return q
    raise SamplingSaturationError(
        f"no free configuration found in {max_tries} samples")


def sample_problem(ws, body, cspace, rng, min_distance, accept_start=None,
                   accept_goal=None, goal_ws=None):
    """Start and goal configurations, at least min_distance apart."""
    for _ in range(1000):
        q0 = sample_free(ws, body, cspace, rng, accept=accept_start)
        g = sample_free(goal_ws if goal_ws is not None else ws, body, cspace,
                        rng, accept=accept_goal)
        if cspace.distance(q0, g) > min_distance:
            return q0, g
    raise SamplingSaturationError("no start/goal pair found")


# gap-height factors (in robot diameters) and wall placement band,
# calibrated so the straight-line baseline lands at its published 45.5%
GAP_FACTORS_2D = (2.0, 12.0)
WALL_BAND_2D = 0.35


def gen_2d_narrow(rng, robot_radius=SPHERE_ROBOT_RADIUS_2D):
    """Unit square with three full-height walls, each pierced by one gap.

    Gap heights range from genuinely narrow (2 robot diameters) to wide;
    wall abscissae keep a minimum separation so the robot can pass
    between walls.
    """
    diam = 2.0 * robot_radius
    half_t = WALL_THICKNESS / 2.0
    min_sep = WALL_THICKNESS + diam + 0.02
    for _ in range(1000):
        xs = np.sort(rng.uniform(-WALL_BAND_2D, WALL_BAND_2D, size=3))
        if np.all(np.diff(xs) >= min_sep):
            break
    prims = []
    for x in xs:
        gap = rng.uniform(*GAP_FACTORS_2D) * diam
        margin = gap / 2.0 + 0.02
        gy = rng.uniform(-0.5 + margin, 0.5 - margin)
        lo_top = gy - gap / 2.0
        hi_bot = gy + gap / 2.0
        prims.append(box2d((x, (lo_top - 0.5) / 2.0), (half_t, (lo_top + 0.5) / 2.0)))
        prims.append(box2d((x, (hi_bot + 0.5) / 2.0), (half_t, (0.5 - hi_bot) / 2.0)))
    return Workspace(2, prims)


def _random_box3d(rng):
    half = rng.uniform(0.03, 0.12, size=3)
    pos = rng.uniform(-0.45, 0.45, size=3)
    return Primitive("box", tuple(half), tuple(pos), tuple(tf.random_quat(rng)))


def gen_3d_boxes(rng):
    """Unit cube with 3 to 10 boxes of random size, position, orientation."""
    count = int(rng.integers(3, 11))
    return Workspace(3, [_random_box3d(rng) for _ in range(count)])


def _random_curved(rng):
    kind = ("sphere", "capsule", "cylinder", "cone")[rng.integers(4)]
    pos = tuple(rng.uniform(-0.45, 0.45, size=3))
    quat = tuple(tf.random_quat(rng))
    if kind == "sphere":
        return Primitive(kind, (rng.uniform(0.04, 0.10),), pos, quat)
    if kind == "cone":
        return Primitive(kind, (rng.uniform(0.04, 0.10), rng.uniform(0.05, 0.12)),
                         pos, quat)
    return Primitive(kind, (rng.uniform(0.03, 0.08), rng.uniform(0.05, 0.15)),
                     pos, quat)


def gen_3d_synthetic(rng):
    """3D-Boxes variant with curved primitives only (evaluation scenes)."""
    count = int(rng.integers(3, 11))
    return Workspace(3, [_random_curved(rng) for _ in range(count)])


def gen_3d_dynamic(rng):
    """3D boxes with a second placement each; poses interpolate over the
    episode."""
    count = int(rng.integers(3, 11))
    prims = [_random_box3d(rng) for _ in range(count)]
    end_poses = [(rng.uniform(-0.45, 0.45, size=3), tf.random_quat(rng))
                 for _ in range(count)]
    return DynamicWorkspace(3, prims, end_poses)


SLOT_WIDTH_FACTORS = (2.0, 8.0)
# y opening: longer than one bar (0.20, plus planning standoff) so a link
# can thread through, but shorter than the S z-extent (0.25) so the body
# cannot slip through sideways; narrow slots then require the classic
# insert-rotate-translate maneuver
SLOT_OPENING_Y = 0.24


def gen_slot(rng):
    """One wall with a rectangular slot; height 2 to 8 smallest link sizes.

    The constrained dimension is z; the y opening is fixed. The slot
    height is stored in ws.info["slot_width"].
    """
    width = rng.uniform(*SLOT_WIDTH_FACTORS) * S_SMALLEST_LINK
    half_t = WALL_THICKNESS / 2.0
    zc = rng.uniform(-0.5 + width / 2.0 + 0.05, 0.5 - width / 2.0 - 0.05)
    yc = rng.uniform(-0.5 + SLOT_OPENING_Y / 2.0 + 0.05,
                     0.5 - SLOT_OPENING_Y / 2.0 - 0.05)
    z_lo, z_hi = zc - width / 2.0, zc + width / 2.0
    y_lo, y_hi = yc - SLOT_OPENING_Y / 2.0, yc + SLOT_OPENING_Y / 2.0
    prims = [
        Primitive("box", (half_t, 0.5, (z_lo + 0.5) / 2.0),
                  (0.0, 0.0, (z_lo - 0.5) / 2.0)),
        Primitive("box", (half_t, 0.5, (0.5 - z_hi) / 2.0),
                  (0.0, 0.0, (z_hi + 0.5) / 2.0)),
        Primitive("box", (half_t, (y_lo + 0.5) / 2.0, width / 2.0),
                  (0.0, (y_lo - 0.5) / 2.0, zc)),
        Primitive("box", (half_t, (0.5 - y_hi) / 2.0, width / 2.0),
                  (0.0, (y_hi + 0.5) / 2.0, zc)),
    ]
    ws = Workspace(3, prims)
    ws.info = {"slot_width": float(width), "slot_center": (float(yc), float(zc))}
    return ws


def gen_empty(dim):
    def gen(rng):
        return Workspace(dim)
    return gen


@dataclass(frozen=True)
class EnvFamily:
    """A named distribution over planning problems."""

    name: str
    dim: int
    workspace: callable
    default_body: str = "sphere"
    default_max_steps: int = 50
    rotating: bool = False
    start_accept: callable = None
    goal_accept: callable = None

    def sample_workspace(self, rng):
        return self.workspace(rng)


def _slot_start(q):
    return q[0] <= -0.2


def _slot_goal(q):
    return q[0] >= 0.2


FAMILIES = {
    "2d_narrow": EnvFamily("2d_narrow", 2, gen_2d_narrow, default_max_steps=50),
    "3d_boxes": EnvFamily("3d_boxes", 3, gen_3d_boxes, default_max_steps=80),
    "3d_synthetic": EnvFamily("3d_synthetic", 3, gen_3d_synthetic,
                              default_max_steps=80),
    "3d_dynamic": EnvFamily("3d_dynamic", 3, gen_3d_dynamic, default_max_steps=80),
    "slot": EnvFamily("slot", 3, gen_slot, default_body="s_shape",
                      default_max_steps=80, rotating=True,
                      start_accept=_slot_start, goal_accept=_slot_goal),
    "empty_2d": EnvFamily("empty_2d", 2, gen_empty(2), default_max_steps=50),
    "empty_3d": EnvFamily("empty_3d", 3, gen_empty(3), default_max_steps=80),
}


def get_family(name):
    if name not in FAMILIES:
        raise ValueError(f"unknown environment family {name!r}; "
                         f"known: {sorted(FAMILIES)}")
    return FAMILIES[name]
