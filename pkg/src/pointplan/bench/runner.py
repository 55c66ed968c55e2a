"""Experiment orchestration: training runs, evaluation suites, baselines.

All randomness flows from the config seed; rerunning a command reproduces
its outputs byte for byte. Wall-clock goes to a separate timings file so
reports stay deterministic.
"""

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..envs import EnvConfig, PlanningEnv, rollout, straight_line_policy
from ..envs.observation import observe
from ..geometry import membership, rasterize
from ..il import DemoSet, collect_demos, train_bc
from ..nets import GaussianPolicy, load_checkpoint, obs_spec_for_env
from ..planners import birrt
from ..rl import SACAgent, train_sac, write_metrics_csv
from . import config as cfgmod

REPORT_FIELDS = ("method", "problems", "solved", "success_rate",
                 "mean_nodes", "mean_path_length")


@dataclass
class MethodOutcome:
    name: str
    records: list           # one dict per problem
    wall_clock: float

    @property
    def success_rate(self):
        n = len(self.records)
        return sum(r["success"] for r in self.records) / n if n else 0.0

    def _solved(self, key):
        vals = [r[key] for r in self.records if r["success"]]
        return float(np.mean(vals)) if vals else float("nan")

    def report_row(self):
        solved = sum(r["success"] for r in self.records)
        return {
            "method": self.name,
            "problems": len(self.records),
            "solved": solved,
            "success_rate": repr(self.success_rate),
            "mean_nodes": repr(self._solved("nodes")),
            "mean_path_length": repr(self._solved("path_length")),
        }


def build_env(doc, rng=None):
    env_doc = doc["env"]
    cfg = cfgmod.env_config_of(doc)
    body = env_doc.get("body")
    env = PlanningEnv(env_doc["family"], cfg, body=body, rng=rng)
    return env


def make_problems(env, count, seed):
    rng = np.random.default_rng(seed)
    return [env.sample_problem(rng) for _ in range(count)]


def problem_seed_of(doc):
    # held-out evaluation stream, distinct from the training stream
    return doc.get("eval_problem_seed", doc["seed"] + 982_451_653)


def evaluate_policy_on_problems(env, policy, problems, light_obs=False):
    """Per-problem records for a step policy (nodes = policy steps)."""
    records = []
    for i, prob in enumerate(problems):
        rng = np.random.default_rng((17, i))
        ep = rollout(env, policy, rng=rng, problem=prob, light_obs=light_obs)
        records.append({
            "problem": i,
            "success": bool(ep.success),
            "nodes": int(ep.length),
            "path_length": float(ep.path_length(env.cspace)),
            "collisions": int(sum(ep.collided)),
        })
    return records


def evaluate_planner_on_problems(env, problems, planner_cfg):
    records = []
    for i, prob in enumerate(problems):
        rng = np.random.default_rng((23, i))
        ws = env.workspace_at(prob.workspace, 0)
        res = birrt(ws, env.plan_body, env.cspace, prob.q0, prob.goal, rng,
                    budget=planner_cfg["budget"],
                    edge_len=env.cfg.max_linear_speed,
                    substep=env.cfg.substep,
                    shortcut_iters=planner_cfg["shortcut_iters"],
                    goal_bias=planner_cfg.get("goal_bias", 0.05))
        row = res.as_row()
        row.update({"problem": i, "collisions": 0})
        records.append(row)
    return records


def train_rl_method(doc, env, out_dir, log=None):
    seed = doc["seed"]
    rng = np.random.default_rng(seed)
    agent = SACAgent(obs_spec_for_env(env), cfgmod.network_of(doc),
                     cfgmod.sac_config_of(doc), rng)
    train_eval_problems = make_problems(env, agent.cfg.eval_episodes,
                                        seed + 51_001)
    metrics = train_sac(env, agent, rng, eval_problems=train_eval_problems,
                        metrics_path=out_dir / "metrics.csv", log=log)
    agent.save(out_dir / "checkpoint.ckpt", extra_config={"experiment": doc})
    return agent.policy_fn(deterministic=True), metrics


def train_bc_method(doc, env, out_dir, log=None):
    seed = doc["seed"]
    rng = np.random.default_rng(seed)
    bc = cfgmod.bc_of(doc)
    demos = collect_demos(env, bc["demo_steps"], rng,
                          budget=bc["planner_budget"])
    policy = GaussianPolicy(obs_spec_for_env(env), cfgmod.network_of(doc), rng)
    history = train_bc(policy, demos, epochs=bc["epochs"], rng=rng,
                       batch_size=bc["batch_size"], lr=bc["lr"], log=log)
    policy.save(out_dir / "checkpoint.ckpt", extra_config={"experiment": doc})
    with open(out_dir / "bc_history.json", "w") as fh:
        json.dump(history, fh)
    return policy.policy_fn(deterministic=True), history


def run_method(doc, env, problems, out_dir, log=None):
    """Train (if needed) and evaluate one method on a fixed problem set."""
    learner = doc["learner"]
    t0 = time.perf_counter()
    if learner == "rl":
        policy, _ = train_rl_method(doc, env, out_dir, log=log)
        records = evaluate_policy_on_problems(env, policy, problems)
    elif learner == "bc":
        policy, _ = train_bc_method(doc, env, out_dir, log=log)
        records = evaluate_policy_on_problems(env, policy, problems)
    elif learner == "straight_line":
        records = evaluate_policy_on_problems(
            env, straight_line_policy(env), problems, light_obs=True)
    elif learner == "birrt":
        records = evaluate_planner_on_problems(env, problems,
                                               cfgmod.planner_of(doc))
    else:
        raise cfgmod.ConfigError(f"unknown learner {learner!r}")
    return MethodOutcome(name=doc.get("name", learner), records=records,
                         wall_clock=time.perf_counter() - t0)


def write_report(out_dir, outcomes):
    out_dir = Path(out_dir)
    with open(out_dir / "report.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_FIELDS)
        writer.writeheader()
        for oc in outcomes:
            writer.writerow(oc.report_row())
    with open(out_dir / "records.jsonl", "w") as fh:
        for oc in outcomes:
            for rec in oc.records:
                fh.write(json.dumps({"method": oc.name, **rec},
                                    sort_keys=True) + "\n")
    # wall-clock is hardware-dependent; it lives outside the report so
    # reruns stay byte-identical
    with open(out_dir / "timings.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "wall_clock_seconds"])
        for oc in outcomes:
            writer.writerow([oc.name, f"{oc.wall_clock:.3f}"])


def run_experiment(doc, out_dir, log=None):
    """Run every method in the document on one shared problem set."""
    cfgmod.validate(doc)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    method_docs = cfgmod.method_documents(doc)
    base_env = build_env(doc)
    problems = make_problems(base_env, doc.get("eval_problems", 400),
                             problem_seed_of(doc))
    outcomes = []
    for name, sub in method_docs:
        if sub["env"] != doc["env"]:
            raise cfgmod.ConfigError(
                f"method {name!r} changes the environment; refuse to compare")
        mdir = out_dir / name if len(method_docs) > 1 else out_dir
        mdir.mkdir(parents=True, exist_ok=True)
        env = build_env(sub)
        outcomes.append(run_method(sub, env, problems, mdir, log=log))
    write_report(out_dir, outcomes)
    with open(out_dir / "config.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    return outcomes


def load_policy(path):
    """Policy function + its experiment document from a checkpoint."""
    stores, cfg = load_checkpoint(path)
    if "sac" in cfg:
        agent, _ = SACAgent.load(path)
        return agent.policy_fn(deterministic=True), cfg
    policy, _ = GaussianPolicy.load(path)
    return policy.policy_fn(deterministic=True), cfg


def export_policy_field(checkpoint_path, env, ws, goal, resolution, out_path):
    """Grid of deterministic policy actions at a fixed goal (2D only).

    CSV columns: x, y, action_x, action_y, occupied. Occupied cells carry
    a null action. Row count is resolution^2.
    """
    if env.cspace.dim != 2:
        raise cfgmod.ConfigError("policy fields are 2D-only")
    policy, _ = load_policy(checkpoint_path)
    centers = (np.arange(resolution) + 0.5) / resolution
    xs = ws.lo[0] + centers * (ws.hi[0] - ws.lo[0])
    ys = ws.lo[1] + centers * (ws.hi[1] - ws.lo[1])
    rows = []
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            q = np.array([x, y])
            occupied = bool(membership(ws, q[None, :])[0])
            if occupied:
                rows.append((x, y, 0.0, 0.0, 1))
                continue
            obs = observe(ws, q, goal, env.cspace, env.cfg,
                          np.random.default_rng((29, iy, ix)))
            action = np.asarray(policy(obs), dtype=float)
            rows.append((x, y, action[0], action[1], 0))
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "action_x", "action_y", "occupied"])
        for row in rows:
            writer.writerow([repr(float(row[0])), repr(float(row[1])),
                             repr(float(row[2])), repr(float(row[3])), row[4]])
    return rows
