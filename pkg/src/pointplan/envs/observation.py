"""Observation pipelines: goal displacement plus an obstacle representation.

All spatial content is expressed in the robot local frame. Clouds have a
fixed cardinality per configuration; when local ray sensing returns fewer
hits than requested, hits are resampled with replacement (a sentinel point
stands in when nothing is visible).
"""

from dataclasses import dataclass

import numpy as np

from ..geometry import (
    UnsupportedRepresentationError,
    cast_rays,
    fibonacci_directions,
    rasterize,
    sample_interior,
    sample_surface,
    sentinel_point,
)


@dataclass
class Observation:
    """goal: local goal displacement; cloud: [N, pf] point features
    (positions, optionally with normals); image/state for the occupancy
    representation."""

    goal: np.ndarray
    cloud: np.ndarray = None
    image: np.ndarray = None
    state: np.ndarray = None

    def parts(self):
        d = {"goal": self.goal}
        if self.cloud is not None:
            d["cloud"] = self.cloud
        if self.image is not None:
            d["image"] = self.image
        if self.state is not None:
            d["state"] = self.state
        return d


def point_feature_size(dim, representation, observability):
    if observability == "local" or representation == "boundary_normals":
        return 2 * dim
    if representation in ("boundary", "interior"):
        return dim
    raise UnsupportedRepresentationError(
        f"no point features for representation {representation!r}")


def _local_ray_cloud(ws, q, cspace, cfg, rng):
    from .. import transforms as tf

    p, rquat = cspace.split(q)
    dirs_local = fibonacci_directions(cfg.ray_count, ws.dim)
    # the ray rig is body-mounted: directions rotate with the body
    if cspace.rotating:
        dirs_world = dirs_local @ tf.quat_to_matrix(rquat).T
    else:
        dirs_world = dirs_local
    t, normals = cast_rays(p, dirs_world, ws)
    hit = np.isfinite(t)
    n = cfg.cloud_size
    if not hit.any():
        sp, sn = sentinel_point(ws)
        pts_local = np.tile(sp, (n, 1))
        nrm_local = np.tile(sn, (n, 1))
        return np.concatenate([pts_local, nrm_local], axis=1)
    pts = p[None, :] + t[hit, None] * dirs_world[hit]
    nrm = normals[hit]
    idx = rng.integers(0, len(pts), size=n)
    pts_local = cspace.to_local_points(q, pts[idx])
    nrm_local = cspace.to_local_vectors(q, nrm[idx])
    return np.concatenate([pts_local, nrm_local], axis=1)


def observe(ws, q, g, cspace, cfg, rng):
    """Observation of workspace ws from configuration q toward goal g."""
    goal = cspace.local_goal(q, g)
    if cfg.observability == "local":
        cloud = _local_ray_cloud(ws, q, cspace, cfg, rng)
        return Observation(goal=goal, cloud=cloud)
    rep = cfg.representation
    if rep == "image":
        if ws.dim != 2:
            raise UnsupportedRepresentationError("occupancy images are 2D-only")
        img = rasterize(ws, cfg.image_resolution)
        p, _ = cspace.split(q)
        return Observation(goal=goal, image=img, state=np.asarray(p, dtype=float))
    if rep == "interior":
        pts = sample_interior(ws, cfg.cloud_size, rng)
        return Observation(goal=goal, cloud=cspace.to_local_points(q, pts))
    pts, nrm = sample_surface(ws, cfg.cloud_size, rng)
    pts_local = cspace.to_local_points(q, pts)
    if rep == "boundary":
        return Observation(goal=goal, cloud=pts_local)
    nrm_local = cspace.to_local_vectors(q, nrm)
    return Observation(goal=goal, cloud=np.concatenate([pts_local, nrm_local], axis=1))
