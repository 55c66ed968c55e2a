"""Compare the compiled geometry kernels against the pure-numpy fallback.

Usage: python benchmarks/kernel_benchmark.py [--repeats 30]

Times the three hot queries (batched membership, collision scans along
motion substeps, batched ray casts) on representative scenes and prints a
table with the speedup of the compiled backend.
"""

import argparse
import time

import numpy as np

from pointplan.envs import ConfigSpace, PlanningEnv
from pointplan.geometry import PackedScene, posed_links, s_shape_body, sphere_robot
from pointplan.geometry.kernels import get_backend
from pointplan.transforms import random_quat
from pointplan.geometry.primitives import Primitive


def random_scene(rng, n=8):
    prims = []
    for _ in range(n):
        kind = ("box", "sphere", "capsule", "cylinder", "cone")[rng.integers(5)]
        pos = tuple(rng.uniform(-0.4, 0.4, size=3))
        quat = tuple(random_quat(rng))
        if kind == "box":
            prims.append(Primitive(kind, tuple(rng.uniform(0.04, 0.15, 3)),
                                   pos, quat))
        elif kind == "sphere":
            prims.append(Primitive(kind, (rng.uniform(0.04, 0.12),), pos, quat))
        else:
            prims.append(Primitive(kind, (rng.uniform(0.03, 0.08),
                                          rng.uniform(0.05, 0.15)), pos, quat))
    return PackedScene(prims)


def bench(fn, repeats):
    fn()  # warm
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=30)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    scene = random_scene(rng)
    contig = (scene.kinds, np.ascontiguousarray(scene.params),
              np.ascontiguousarray(scene.pos), np.ascontiguousarray(scene.rot))
    kinds, params, pos, rot = contig

    pts = np.ascontiguousarray(rng.uniform(-0.5, 0.5, size=(4096, 3)))
    dirs = rng.normal(size=(256, 3))
    dirs = np.ascontiguousarray(dirs / np.linalg.norm(dirs, axis=1, keepdims=True))
    origin = np.zeros(3)

    body = s_shape_body()
    cs = ConfigSpace(3, rotating=True)
    configs = np.array([np.concatenate([rng.uniform(-0.4, 0.4, 3),
                                        random_quat(rng)]) for _ in range(16)])
    rpos, rrot = posed_links(body, configs, 3)
    b = body.packed

    cases = {
        "points_inside (4096 pts, 8 prims)":
            lambda k: k.points_inside(pts, *contig),
        "points_distance (4096 pts)":
            lambda k: k.points_distance(pts, *contig),
        "first_collision (16 poses x 5 links)":
            lambda k: k.first_collision(b.kinds, np.ascontiguousarray(b.params),
                                        b.bound, rpos, rrot, kinds, params,
                                        scene.bound, pos, rot),
        "ray_scene (256 rays)":
            lambda k: k.ray_scene(origin, dirs, kinds, params, pos, rot, 2.0),
    }

    backends = {}
    for name in ("python", "compiled"):
        try:
            backends[name] = get_backend(name)
        except ImportError:
            print(f"backend {name} unavailable; skipping")
    print(f"{'query':42s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, fn in cases.items():
        times = {}
        for name, mod in backends.items():
            times[name] = bench(lambda m=mod: fn(m), args.repeats)
        py = times.get("python")
        cy = times.get("compiled")
        speed = f"{py / cy:7.1f}x" if py and cy else "    n/a"
        print(f"{label:42s} {1e3 * py:9.3f}ms {1e3 * cy:9.3f}ms {speed}")

    # end-to-end: the same planner query under each backend (the geometry
    # layer resolves kernel functions at call time, so swapping the module
    # attributes switches the implementation)
    print("\nend-to-end planner timing (one 2D narrow problem, 50k budget cap):")
    import pointplan.geometry.kernels as kernel_ns
    from pointplan.planners import birrt

    names = ("points_inside", "points_distance", "closest_point_box",
             "first_collision", "ray_scene")
    saved = {n: getattr(kernel_ns, n) for n in names}
    try:
        for bname, mod in backends.items():
            for n in names:
                setattr(kernel_ns, n, getattr(mod, n))
            env = PlanningEnv("2d_narrow")
            prng = np.random.default_rng(4)
            prob = env.sample_problem(prng)
            t0 = time.perf_counter()
            res = birrt(prob.workspace, env.plan_body, env.cspace, prob.q0,
                        prob.goal, prng, budget=50_000, edge_len=0.15)
            print(f"  {bname:9s}: {time.perf_counter() - t0:6.2f}s "
                  f"(success={res.success}, nodes={res.nodes_expanded})")
    finally:
        for n, fn in saved.items():
            setattr(kernel_ns, n, fn)


if __name__ == "__main__":
    main()
