"""Configuration-space arithmetic for translating and free-flying bodies.

Configurations are flat float64 arrays: [x, y] / [x, y, z] for translating
robots, [x, y, z, qw, qx, qy, qz] for 6-DoF rigid bodies. Actions are
normalized twists in [-1, 1] per component, scaled by the speed caps.
"""

from dataclasses import dataclass

import numpy as np

from .. import transforms as tf


@dataclass(frozen=True)
class ConfigSpace:
    dim: int
    rotating: bool = False
    rotation_weight: float = 0.2

    @property
    def q_size(self):
        return 7 if self.rotating else self.dim

    @property
    def action_size(self):
        return 6 if self.rotating else self.dim

    def split(self, q):
        q = np.asarray(q, dtype=float)
        if self.rotating:
            return q[:3], q[3:]
        return q, None

    def make(self, pos, quat=None):
        if self.rotating:
            return np.concatenate([pos, tf.IDENTITY_QUAT if quat is None else quat])
        return np.asarray(pos, dtype=float).copy()

    def distance(self, q1, q2):
        """Translation norm plus weighted rotation angle."""
        p1, r1 = self.split(q1)
        p2, r2 = self.split(q2)
        d = float(np.linalg.norm(p2 - p1))
        if self.rotating:
            d += self.rotation_weight * tf.quat_angle(r1, r2)
        return d

    def interpolate(self, q1, q2, s):
        p1, r1 = self.split(q1)
        p2, r2 = self.split(q2)
        pos = (1.0 - s) * p1 + s * p2
        if not self.rotating:
            return pos
        return np.concatenate([pos, tf.quat_slerp(r1, r2, s)])

    def twist_of_action(self, action, max_linear, max_angular):
        """Physical (linear, angular) body-frame twist of a normalized action."""
        action = np.clip(np.asarray(action, dtype=float), -1.0, 1.0)
        lin = action[: self.dim] * max_linear
        ang = action[self.dim:] * max_angular if self.rotating else None
        return lin, ang

    def action_of_displacement(self, q_from, q_to, max_linear, max_angular):
        """Normalized action whose unit-step twist moves q_from to q_to."""
        p1, r1 = self.split(q_from)
        p2, r2 = self.split(q_to)
        delta = p2 - p1
        if not self.rotating:
            return delta / max_linear
        lin = tf.quat_to_matrix(r1).T @ delta
        ang = tf.quat_to_rotvec(tf.quat_multiply(tf.quat_conjugate(r1), r2))
        return np.concatenate([lin / max_linear, ang / max_angular])

    def twist_norm(self, lin, ang):
        n = float(np.linalg.norm(lin))
        if ang is not None:
            n = float(np.sqrt(n * n + float(ang @ ang)))
        return n

    def motion_size(self, lin, ang):
        """Configuration-metric length of a unit-time twist."""
        s = float(np.linalg.norm(lin))
        if ang is not None:
            s += self.rotation_weight * float(np.linalg.norm(ang))
        return s

    def apply_twist(self, q, lin, ang, s=1.0):
        """Configuration after fraction s of a unit-time body-frame twist."""
        p, r = self.split(q)
        if not self.rotating:
            return p + s * lin
        world_lin = tf.quat_to_matrix(r) @ lin
        quat = tf.quat_multiply(r, tf.quat_from_rotvec(s * ang))
        return np.concatenate([p + s * world_lin, quat / np.linalg.norm(quat)])

    def twist_path(self, q, lin, ang, fractions):
        """Configurations along the twist at the given fractions."""
        fr = np.asarray(fractions, dtype=float)
        p, r = self.split(q)
        if not self.rotating:
            return p[None, :] + fr[:, None] * np.asarray(lin, dtype=float)[None, :]
        world_lin = tf.quat_to_matrix(r) @ lin
        pos = p[None, :] + fr[:, None] * world_lin[None, :]
        angle = float(np.linalg.norm(ang))
        if angle < 1e-12:
            quats = np.broadcast_to(r, (len(fr), 4)).copy()
        else:
            axis = np.asarray(ang, dtype=float) / angle
            half = 0.5 * fr * angle
            dq = np.empty((len(fr), 4))
            dq[:, 0] = np.cos(half)
            dq[:, 1:] = np.sin(half)[:, None] * axis[None, :]
            # batched right-multiplication r * dq
            w, x, y, z = r
            quats = np.empty((len(fr), 4))
            quats[:, 0] = w * dq[:, 0] - x * dq[:, 1] - y * dq[:, 2] - z * dq[:, 3]
            quats[:, 1] = w * dq[:, 1] + x * dq[:, 0] + y * dq[:, 3] - z * dq[:, 2]
            quats[:, 2] = w * dq[:, 2] - x * dq[:, 3] + y * dq[:, 0] + z * dq[:, 1]
            quats[:, 3] = w * dq[:, 3] + x * dq[:, 2] - y * dq[:, 1] + z * dq[:, 0]
            quats /= np.linalg.norm(quats, axis=1, keepdims=True)
        return np.concatenate([pos, quats], axis=1)

    def sample(self, rng, lo, hi):
        pos = rng.uniform(lo, hi)
        if not self.rotating:
            return pos
        return np.concatenate([pos, tf.random_quat(rng)])

    def local_goal(self, q, g):
        """Goal displacement expressed in the robot local frame.

        Translation-only robots keep world axes; 6-DoF robots rotate the
        displacement into the body frame and append the relative rotation
        vector.
        """
        p, r = self.split(q)
        gp, gr = self.split(g)
        if not self.rotating:
            return gp - p
        rot = tf.quat_to_matrix(r)
        dp = rot.T @ (gp - p)
        drot = tf.quat_to_rotvec(tf.quat_multiply(tf.quat_conjugate(r), gr))
        return np.concatenate([dp, drot])

    def to_local_points(self, q, pts):
        p, r = self.split(q)
        rel = np.asarray(pts, dtype=float) - p
        if not self.rotating:
            return rel
        return rel @ tf.quat_to_matrix(r)

    def to_local_vectors(self, q, vecs):
        if not self.rotating:
            return np.asarray(vecs, dtype=float).copy()
        _, r = self.split(q)
        return np.asarray(vecs, dtype=float) @ tf.quat_to_matrix(r)

    @property
    def goal_size(self):
        return 6 if self.rotating else self.dim
