"""Expert demonstration collection from planner solutions.

Planner paths are resampled into waypoints at most one policy step apart;
each waypoint contributes an (observation, action) pair where the action
is the displacement to the next waypoint in the normalized action frame.
Observations are regenerated with fresh cloud samples, matching what a
policy sees at test time.
"""

import json
import logging

import numpy as np

from ..envs.observation import observe
from ..planners import birrt

logger = logging.getLogger(__name__)


class DemoSet:
    """Flat arrays of (observation parts, action) pairs with provenance."""

    def __init__(self, obs_parts, actions, problem_ids, env_fingerprint):
        self.obs_parts = obs_parts          # dict name -> [n, ...]
        self.actions = np.asarray(actions)
        self.problem_ids = np.asarray(problem_ids, dtype=np.int64)
        self.env_fingerprint = env_fingerprint

    def __len__(self):
        return len(self.actions)

    def batch(self, idx):
        return ({k: v[idx] for k, v in self.obs_parts.items()},
                self.actions[idx])

    def save_jsonl(self, path):
        """One JSON record per pair, preceded by a header line.

        Floats serialize via repr and parse back bit-exactly.
        """
        with open(path, "w") as fh:
            header = {"kind": "demo_set", "count": len(self),
                      "env_fingerprint": self.env_fingerprint,
                      "parts": sorted(self.obs_parts)}
            fh.write(json.dumps(header) + "\n")
            for i in range(len(self)):
                row = {"problem": int(self.problem_ids[i]),
                       "action": self.actions[i].tolist(),
                       "obs": {k: np.asarray(v[i]).tolist()
                               for k, v in self.obs_parts.items()}}
                fh.write(json.dumps(row) + "\n")

    @classmethod
    def load_jsonl(cls, path, expect_fingerprint=None):
        with open(path) as fh:
            header = json.loads(fh.readline())
            if header.get("kind") != "demo_set":
                raise ValueError("not a demo-set file")
            if (expect_fingerprint is not None
                    and header["env_fingerprint"] != expect_fingerprint):
                raise ValueError(
                    "demo set was collected under a different observation "
                    "configuration")
            parts = {k: [] for k in header["parts"]}
            actions, pids = [], []
            for line in fh:
                row = json.loads(line)
                actions.append(row["action"])
                pids.append(row["problem"])
                for k in parts:
                    parts[k].append(row["obs"][k])
        return cls({k: np.asarray(v) for k, v in parts.items()},
                   np.asarray(actions), pids, header["env_fingerprint"])


def env_fingerprint(env):
    """Hashable digest of everything that shapes observations."""
    import hashlib

    desc = json.dumps({"env": env.cfg.to_dict(), "family": env.family.name,
                       "body": env.body.name}, sort_keys=True)
    return hashlib.sha256(desc.encode()).hexdigest()[:16]


def path_to_pairs(env, ws, path, goal, rng):
    """(observation parts, normalized action) pairs along a waypoint path."""
    cs, cfg = env.cspace, env.cfg
    pairs = []
    for i in range(len(path) - 1):
        obs = observe(ws, path[i], goal, cs, cfg, rng)
        action = cs.action_of_displacement(path[i], path[i + 1],
                                           cfg.max_linear_speed,
                                           cfg.max_angular_speed)
        pairs.append((obs.parts(), np.clip(action, -1.0, 1.0)))
    return pairs


def collect_demos(env, n_steps, rng, budget=50_000, shortcut_iters=100,
                  max_problems=None):
    """Solve random problems with the planner until n_steps pairs exist.

    Unsolved problems are skipped and logged. Returns a DemoSet.
    """
    cs, cfg = env.cspace, env.cfg
    parts_acc = None
    actions, pids = [], []
    n = 0
    problem_id = 0
    skipped = 0
    while n < n_steps and (max_problems is None or problem_id < max_problems):
        problem = env.sample_problem(rng)
        ws = env.workspace_at(problem.workspace, 0)
        result = birrt(ws, env.plan_body, cs, problem.q0, problem.goal, rng,
                       budget=budget, edge_len=cfg.max_linear_speed,
                       substep=cfg.substep, shortcut_iters=shortcut_iters)
        problem_id += 1
        if not result.success:
            skipped += 1
            logger.info("demo problem %d unsolved within budget; skipped",
                        problem_id)
            continue
        for obs_parts, action in path_to_pairs(env, ws, result.path,
                                               problem.goal, rng):
            if parts_acc is None:
                parts_acc = {k: [] for k in obs_parts}
            for k, v in obs_parts.items():
                parts_acc[k].append(v)
            actions.append(action)
            pids.append(problem_id - 1)
            n += 1
            if n >= n_steps:
                break
    if skipped:
        logger.info("collected %d pairs, skipped %d unsolved problems",
                    n, skipped)
    return DemoSet({k: np.asarray(v) for k, v in (parts_acc or {}).items()},
                   np.asarray(actions), pids, env_fingerprint(env))
