"""Bidirectional RRT with path shortcutting.

The classical baseline and the demonstration generator. Edges are steered
with the same clipped-motion routine as policy steps and capped at one
policy step, so node counts are directly comparable between the planner
and learned policies; nodes_expanded counts every collision-checked
candidate motion, shortcut attempts included.
"""

from dataclasses import dataclass, field

import numpy as np

from .envs.cspace import ConfigSpace
from .envs.planning_env import clip_motion
from .geometry import collide

GOAL_BIAS = 0.05
CONNECT_TOL = 1e-9


@dataclass
class PlanResult:
    path: np.ndarray          # [K, q_size] waypoints, empty on failure
    nodes_expanded: int
    success: bool
    path_length: float = 0.0

    def as_row(self):
        return {"success": bool(self.success),
                "nodes": int(self.nodes_expanded),
                "path_length": float(self.path_length)}


class _Tree:
    def __init__(self, root, q_size):
        self.configs = np.zeros((64, q_size))
        self.configs[0] = root
        self.parents = [-1]
        self.n = 1

    def add(self, q, parent):
        if self.n == len(self.configs):
            self.configs = np.vstack([self.configs, np.zeros_like(self.configs)])
        self.configs[self.n] = q
        self.parents.append(parent)
        self.n += 1
        return self.n - 1

    def nearest(self, q, cspace):
        pts = self.configs[: self.n]
        d = np.linalg.norm(pts[:, : cspace.dim] - q[: cspace.dim], axis=1)
        if cspace.rotating:
            dots = np.abs(pts[:, 3:] @ q[3:])
            d = d + cspace.rotation_weight * 2.0 * np.arccos(np.minimum(dots, 1.0))
        return int(np.argmin(d))

    def path_from_root(self, idx):
        out = []
        while idx >= 0:
            out.append(self.configs[idx].copy())
            idx = self.parents[idx]
        return out[::-1]


def _steer(ws, body, cspace, q_from, q_to, edge_len, substep):
    """One bounded, collision-clipped step from q_from toward q_to.

    Returns (q_new, reached_target). q_new is None when no progress was
    possible. Costs exactly one collision-checked motion.
    """
    d = cspace.distance(q_from, q_to)
    if d <= CONNECT_TOL:
        return q_to.copy(), True
    s = min(1.0, edge_len / d)
    target = cspace.interpolate(q_from, q_to, s)
    lin, ang = _twist_between(cspace, q_from, target)
    q_new, collided = clip_motion(ws, body, cspace, q_from, lin, ang, substep)
    if cspace.distance(q_from, q_new) <= CONNECT_TOL:
        return None, False
    reached = (not collided) and s >= 1.0 - CONNECT_TOL
    return q_new, reached


def _twist_between(cspace, q_from, q_to):
    from . import transforms as tf

    p1, r1 = cspace.split(q_from)
    p2, r2 = cspace.split(q_to)
    if not cspace.rotating:
        return p2 - p1, None
    lin = tf.quat_to_matrix(r1).T @ (p2 - p1)
    ang = tf.quat_to_rotvec(tf.quat_multiply(tf.quat_conjugate(r1), r2))
    return lin, ang


def default_edge_length(cspace, max_linear_speed):
    """Edge cap in the configuration metric: one policy step's translation
    (rotation rides along via the steering interpolation)."""
    return max_linear_speed


def birrt(ws, body, cspace, q0, qg, rng, budget=50_000, edge_len=None,
          substep=0.01, shortcut_iters=100, goal_bias=GOAL_BIAS):
    """Bidirectional RRT between q0 and qg.

    Alternates growing the two trees: one bounded extend toward a uniform
    sample (or, with goal_bias, the opposite root), then a greedy connect
    of the other tree toward the new node. Fails once nodes_expanded
    reaches the budget.
    """
    q0 = np.asarray(q0, dtype=float)
    qg = np.asarray(qg, dtype=float)
    if collide(body, q0, ws) or collide(body, qg, ws):
        raise ValueError("birrt endpoints must be collision-free")
    if edge_len is None:
        edge_len = default_edge_length(cspace, 0.15)
    trees = (_Tree(q0, cspace.q_size), _Tree(qg, cspace.q_size))
    nodes = 0

    def extend(tree, q_target):
        nonlocal nodes
        i_near = tree.nearest(q_target, cspace)
        q_new, reached = _steer(ws, body, cspace, tree.configs[i_near],
                                q_target, edge_len, substep)
        nodes += 1
        if q_new is None:
            return None, False
        return tree.add(q_new, i_near), reached

    def connect(tree, q_target):
        nonlocal nodes
        idx, reached = extend(tree, q_target)
        while idx is not None and not reached and nodes < budget:
            prev = idx
            idx, reached = extend(tree, q_target)
            if idx is not None and np.allclose(tree.configs[idx],
                                               tree.configs[prev]):
                break
        return idx, reached

    a, b = 0, 1
    while nodes < budget:
        if rng.random() < goal_bias:
            sample = trees[b].configs[0]
        else:
            sample = cspace.sample(rng, ws.lo, ws.hi)
        idx_a, _ = extend(trees[a], sample)
        if idx_a is not None:
            idx_b, reached = connect(trees[b], trees[a].configs[idx_a])
            if reached:
                part_a = trees[a].path_from_root(idx_a)
                part_b = trees[b].path_from_root(idx_b)
                if a == 1:
                    part_a, part_b = part_b, part_a
                path = part_a + part_b[::-1]
                path = _dedupe(path, cspace)
                if shortcut_iters:
                    path, extra = shortcut(ws, body, cspace, path, shortcut_iters,
                                           rng, edge_len=edge_len, substep=substep)
                    nodes += extra
                path = rediscretize(path, cspace, edge_len)
                return PlanResult(path=np.asarray(path), nodes_expanded=nodes,
                                  success=True,
                                  path_length=_length(path, cspace))
        a, b = b, a
    return PlanResult(path=np.zeros((0, cspace.q_size)), nodes_expanded=nodes,
                      success=False)


def _dedupe(path, cspace):
    out = [path[0]]
    for q in path[1:]:
        if cspace.distance(out[-1], q) > CONNECT_TOL:
            out.append(q)
    return out


def _length(path, cspace):
    return float(sum(cspace.distance(path[i], path[i + 1])
                     for i in range(len(path) - 1)))


def _point_along(path, cspace, lengths, s):
    """Configuration at arc-length s, and its segment index."""
    for i in range(len(path) - 1):
        if s <= lengths[i] or i == len(path) - 2:
            seg = lengths[i]
            frac = 0.0 if seg == 0 else min(s / seg, 1.0)
            return cspace.interpolate(path[i], path[i + 1], frac), i
        s -= lengths[i]
    return path[-1], len(path) - 2


def segment_free(ws, body, cspace, qa, qb, substep):
    lin, ang = _twist_between(cspace, qa, qb)
    q_end, collided = clip_motion(ws, body, cspace, qa, lin, ang, substep)
    return (not collided) and cspace.distance(q_end, qb) <= 1e-9


def shortcut(ws, body, cspace, path, iters, rng, edge_len=0.15, substep=0.01):
    """Random splice shortcutting; never increases length.

    Returns (path, collision_checked_motions): each splice attempt is
    validated at substep resolution and billed in edge-length units.
    """
    path = [np.asarray(q, dtype=float) for q in path]
    checks = 0
    for _ in range(iters):
        if len(path) < 3:
            break
        lengths = [cspace.distance(path[i], path[i + 1])
                   for i in range(len(path) - 1)]
        total = sum(lengths)
        if total <= 0:
            break
        s1, s2 = sorted(rng.uniform(0.0, total, size=2))
        qa, seg_a = _point_along(path, cspace, lengths, s1)
        qb, seg_b = _point_along(path, cspace, lengths, s2)
        direct = cspace.distance(qa, qb)
        if seg_b <= seg_a or direct >= s2 - s1:
            continue
        checks += max(1, int(np.ceil(direct / edge_len)))
        if segment_free(ws, body, cspace, qa, qb, substep):
            path = path[: seg_a + 1] + [qa, qb] + path[seg_b + 1:]
            path = _dedupe(path, cspace)
    return path, checks


def rediscretize(path, cspace, edge_len):
    """Resample a path so consecutive waypoints are at most edge_len apart."""
    out = [np.asarray(path[0], dtype=float)]
    for i in range(len(path) - 1):
        d = cspace.distance(path[i], path[i + 1])
        n = max(1, int(np.ceil(d / edge_len)))
        for k in range(1, n + 1):
            out.append(cspace.interpolate(path[i], path[i + 1], k / n))
    return _dedupe(out, cspace)


def validate_path(ws, body, cspace, path, substep=0.01):
    """True iff every edge replays collision-free through clip_motion."""
    for i in range(len(path) - 1):
        if not segment_free(ws, body, cspace, path[i], path[i + 1], substep):
            return False
    return True
