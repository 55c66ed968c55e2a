"""Goal-conditioned planning environment: clipped-motion dynamics, reward,
episode bookkeeping, and rollouts."""

import json
from dataclasses import dataclass, field

import numpy as np

from ..geometry import DynamicWorkspace, first_colliding, inflate_body, make_body
from .config import EnvConfig
from .cspace import ConfigSpace
from .generators import (
    SPHERE_ROBOT_RADIUS_2D,
    SPHERE_ROBOT_RADIUS_3D,
    get_family,
    sample_free,
    sample_problem,
)
from .observation import Observation, observe


@dataclass(frozen=True)
class Problem:
    """One planning instance: workspace (possibly dynamic) plus endpoints."""

    workspace: object
    q0: np.ndarray
    goal: np.ndarray


@dataclass
class StepResult:
    q: np.ndarray
    reward: float
    reached_goal: bool
    collided: bool
    terminal: bool
    observation: Observation


@dataclass
class Episode:
    """Transition record of one rollout."""

    goal: np.ndarray
    observations: list = field(default_factory=list)   # o_0 .. o_T
    actions: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    configs: list = field(default_factory=list)        # q_0 .. q_T
    collided: list = field(default_factory=list)
    reached: list = field(default_factory=list)
    success: bool = False
    truncated: bool = False

    @property
    def length(self):
        return len(self.actions)

    def path_length(self, cspace):
        return float(sum(cspace.distance(self.configs[i], self.configs[i + 1])
                         for i in range(len(self.configs) - 1)))


def clip_motion(ws, body, cspace, q, lin, ang, substep):
    """Last collision-free configuration along a unit-time twist from q.

    Walks the screw path in substeps no longer than `substep` in the
    configuration metric; q itself is assumed collision-free.
    """
    size = cspace.motion_size(lin, ang)
    if size == 0.0:
        return np.asarray(q, dtype=float).copy(), False
    n_sub = max(1, int(np.ceil(size / substep)))
    fractions = (np.arange(n_sub) + 1.0) / n_sub
    path = cspace.twist_path(q, lin, ang, fractions)
    hit = first_colliding(body, path, ws)
    if hit < 0:
        return path[-1], False
    if hit == 0:
        return np.asarray(q, dtype=float).copy(), True
    return path[hit - 1], True


class PlanningEnv:
    """Single-owner environment over one problem family.

    reset() draws (or accepts) a problem; step() applies a normalized
    action through the clipped-motion dynamics. Dynamic workspaces are
    snapshotted at the episode fraction step/max_steps.
    """

    def __init__(self, family_name, cfg: EnvConfig = None, body=None, rng=None):
        self.family = get_family(family_name)
        self.cfg = cfg or EnvConfig(max_steps=self.family.default_max_steps)
        default_radius = (SPHERE_ROBOT_RADIUS_2D if self.family.dim == 2
                          else SPHERE_ROBOT_RADIUS_3D)
        if body is None:
            body = make_body(self.family.default_body, self.family.dim,
                             sphere_radius=default_radius)
        elif isinstance(body, str):
            body = make_body(body, self.family.dim, sphere_radius=default_radius)
        self.body = body
        # start/goal sampling keeps a one-substep standoff from obstacles
        # so planned paths around the endpoints survive re-discretization
        self.plan_body = inflate_body(body, self.cfg.substep)
        rotating = self.family.rotating or body.name == "s_shape"
        self.cspace = ConfigSpace(self.family.dim, rotating=rotating,
                                  rotation_weight=self.cfg.rotation_weight)
        self.rng = rng or np.random.default_rng()
        self._problem = None
        self._q = None
        self._steps = 0
        self._terminal = True

    # ------------------------------------------------------------- problems

    def sample_raw_workspace(self, rng):
        return self.family.sample_workspace(rng)

    def workspace_at(self, raw_ws, step):
        if isinstance(raw_ws, DynamicWorkspace):
            return raw_ws.at(step / self.cfg.max_steps)
        return raw_ws

    def sample_problem(self, rng):
        raw = self.sample_raw_workspace(rng)
        ws0 = self.workspace_at(raw, 0)
        min_d = self.cfg.min_start_goal_distance_factor * self.cfg.goal_tolerance
        goal_ws = ws0
        if isinstance(raw, DynamicWorkspace):
            goal_ws = raw.at(1.0)
        q0, g = sample_problem(ws0, self.plan_body, self.cspace, rng, min_d,
                               accept_start=self.family.start_accept,
                               accept_goal=self.family.goal_accept,
                               goal_ws=goal_ws)
        return Problem(workspace=raw, q0=q0, goal=g)

    # ------------------------------------------------------------- episodes

    def reset(self, rng=None, problem=None):
        if rng is not None:
            self.rng = rng
        if problem is None:
            problem = self.sample_problem(self.rng)
        self._problem = problem
        self._q = np.asarray(problem.q0, dtype=float).copy()
        self._steps = 0
        self._terminal = False
        return self.observe()

    @property
    def q(self):
        return self._q

    @property
    def goal(self):
        return self._problem.goal

    @property
    def steps(self):
        return self._steps

    @property
    def terminal(self):
        return self._terminal

    def current_workspace(self):
        return self.workspace_at(self._problem.workspace, self._steps)

    def observe(self, q=None):
        return observe(self.current_workspace(), self._q if q is None else q,
                       self._problem.goal, self.cspace, self.cfg, self.rng)

    def step(self, action, observe=True):
        """Apply a normalized action; returns a StepResult."""
        if self._terminal:
            raise RuntimeError("step() on a terminal episode; call reset()")
        ws = self.current_workspace()
        lin, ang = self.cspace.twist_of_action(
            action, self.cfg.max_linear_speed, self.cfg.max_angular_speed)
        q_next, collided = clip_motion(ws, self.body, self.cspace, self._q,
                                       lin, ang, self.cfg.substep)
        reached = (self.cspace.distance(q_next, self._problem.goal)
                   <= self.cfg.goal_tolerance)
        reward = -self.cspace.twist_norm(lin, ang) + task_reward(
            self.cfg, reached, collided)
        self._steps += 1
        self._q = q_next
        self._terminal = reached or self._steps >= self.cfg.max_steps
        return StepResult(q=q_next, reward=reward, reached_goal=reached,
                          collided=collided, terminal=self._terminal,
                          observation=self.observe() if observe else None)


def task_reward(cfg, reached, collided):
    """Goal bonus takes precedence; collisions do not terminate episodes."""
    if reached:
        return cfg.reward_goal
    if collided:
        return cfg.reward_collision
    return cfg.reward_free


def rollout(env, policy, rng=None, problem=None, light_obs=False):
    """Run one episode to termination under `policy(observation) -> action`.

    light_obs skips cloud/image generation and hands the policy a
    goal-only observation; use it for policies that ignore the obstacle
    channel (straight-line baseline, planner replays).
    """
    obs = env.reset(rng=rng, problem=problem)
    if light_obs:
        obs = Observation(goal=env.cspace.local_goal(env.q, env.goal))
    ep = Episode(goal=np.asarray(env.goal, dtype=float).copy())
    ep.observations.append(obs)
    ep.configs.append(env.q.copy())
    while not env.terminal:
        action = np.asarray(policy(obs), dtype=float)
        res = env.step(action, observe=not light_obs)
        obs = res.observation
        if light_obs:
            obs = Observation(goal=env.cspace.local_goal(env.q, env.goal))
        ep.actions.append(action)
        ep.rewards.append(res.reward)
        ep.configs.append(res.q.copy())
        ep.collided.append(res.collided)
        ep.reached.append(res.reached_goal)
        ep.observations.append(obs)
    ep.success = bool(ep.reached and ep.reached[-1])
    ep.truncated = not ep.success
    return ep


def straight_line_policy(env):
    """Head straight for the goal at full speed (normalized action)."""
    def policy(obs):
        a = np.asarray(obs.goal, dtype=float).copy()
        a[: env.cspace.dim] /= env.cfg.max_linear_speed
        if env.cspace.rotating:
            a[env.cspace.dim:] /= env.cfg.max_angular_speed
        return np.clip(a, -1.0, 1.0)
    return policy


def episode_records(ep, problem_id=None):
    """JSON-ready per-step records of an episode."""
    rows = []
    for t in range(ep.length):
        rows.append({
            "problem": problem_id,
            "step": t,
            "q": np.asarray(ep.configs[t]).tolist(),
            "action": np.asarray(ep.actions[t]).tolist(),
            "reward": float(ep.rewards[t]),
            "collided": bool(ep.collided[t]),
            "reached": bool(ep.reached[t]),
        })
    return rows


def export_episodes_jsonl(path, episodes):
    with open(path, "w") as fh:
        for i, ep in enumerate(episodes):
            for row in episode_records(ep, problem_id=i):
                fh.write(json.dumps(row) + "\n")
