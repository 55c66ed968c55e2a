"""Geometric primitives, collision predicates, and surface sampling."""

from .primitives import (
    Body,
    DynamicWorkspace,
    PackedScene,
    Primitive,
    Workspace,
    box2d,
    config_pose,
    disk,
    embed_point,
    inflate_body,
    make_body,
    posed_links,
    s_shape_body,
    sphere_robot,
    workspace_from_dict,
    S_SMALLEST_LINK,
)
from .queries import (
    RayHit,
    UnsupportedRepresentationError,
    cast_rays,
    closest_point_box,
    collide,
    fibonacci_directions,
    first_colliding,
    membership,
    min_distance,
    ray_cast,
    rasterize,
    sample_interior,
    sample_surface,
    sentinel_point,
)
from . import kernels

__all__ = [
    "Body", "DynamicWorkspace", "PackedScene", "Primitive", "Workspace",
    "box2d", "config_pose", "disk", "embed_point", "inflate_body", "make_body",
    "posed_links", "s_shape_body", "sphere_robot", "workspace_from_dict",
    "S_SMALLEST_LINK", "RayHit", "UnsupportedRepresentationError",
    "cast_rays", "closest_point_box", "collide", "fibonacci_directions",
    "first_colliding", "membership", "min_distance", "ray_cast",
    "rasterize", "sample_interior", "sample_surface", "sentinel_point",
    "kernels",
]
