"""Geometry kernel backend selection.

Prefers the compiled Cython module and falls back to the pure-numpy twin
when the extension is unavailable. ``POINTPLAN_KERNELS=python|compiled``
forces a backend (``compiled`` raises if the extension did not build).
``benchmarks/kernel_benchmark.py`` compares the two.
"""

import os

from . import _fallback

_forced = os.environ.get("POINTPLAN_KERNELS", "").strip().lower()

if _forced == "python":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _compiled as _impl
        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = _fallback
        BACKEND = "python"

BOX = _fallback.BOX
SPHERE = _fallback.SPHERE
CAPSULE = _fallback.CAPSULE
CYLINDER = _fallback.CYLINDER
CONE = _fallback.CONE

points_inside = _impl.points_inside
points_distance = _impl.points_distance
closest_point_box = _impl.closest_point_box
first_collision = _impl.first_collision
ray_scene = _impl.ray_scene


def get_backend(name):
    """Explicit backend module by name (for tests and benchmarks)."""
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _compiled
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")
