"""SAC training loop: rollouts, hindsight relabeling, periodic evaluation."""

import csv

import numpy as np

from ..envs.planning_env import Episode, rollout
from ..nets.models import obs_spec_for_env
from .her import her_relabel
from .replay import ReplayBuffer
from .sac import SACAgent

METRIC_FIELDS = ("env_step", "eval_success", "actor_loss", "critic_loss",
                 "alpha", "mean_return")


def evaluate_policy(env, policy, problems, rng_seed=0):
    """Deterministic-policy success rate over a fixed problem set."""
    wins = 0
    for i, prob in enumerate(problems):
        rng = np.random.default_rng((rng_seed, i))
        ep = rollout(env, policy, rng=rng, problem=prob)
        wins += ep.success
    return wins / max(len(problems), 1)


def generate_eval_problems(env, n, seed):
    rng = np.random.default_rng(seed)
    return [env.sample_problem(rng) for _ in range(n)]


def train_sac(env, agent: SACAgent, rng, eval_problems=None, eval_env=None,
              metrics_path=None, log=None):
    """Train the agent in place; returns the metrics table.

    Deterministic given `rng` and the agent's initial parameters: all
    sampling (exploration, replay, relabeling, evaluation observations)
    draws from fixed streams.
    """
    cfg = agent.cfg
    spec = obs_spec_for_env(env)
    buffer = ReplayBuffer(cfg.buffer_capacity, spec.parts_shapes(),
                          spec.action_size)
    if eval_env is None:
        eval_env = type(env)(env.family.name, env.cfg, body=env.body)
    if eval_problems is None:
        eval_problems = generate_eval_problems(
            eval_env, cfg.eval_episodes, seed=int(rng.integers(2 ** 31)))

    metrics = []
    loss_sums = {"actor_loss": 0.0, "critic_loss": 0.0, "alpha": 0.0}
    loss_count = 0
    returns = []
    update_debt = 0.0

    obs = env.reset(rng=rng)
    episode = Episode(goal=env.goal.copy())
    episode.observations.append(obs)
    episode.configs.append(env.q.copy())

    def flush_eval(step):
        nonlocal loss_count, returns
        policy = agent.policy_fn(deterministic=True)
        success = evaluate_policy(eval_env, policy, eval_problems)
        denom = max(loss_count, 1)
        row = {
            "env_step": step,
            "eval_success": success,
            "actor_loss": loss_sums["actor_loss"] / denom,
            "critic_loss": loss_sums["critic_loss"] / denom,
            "alpha": loss_sums["alpha"] / denom if loss_count else agent.alpha,
            "mean_return": float(np.mean(returns)) if returns else 0.0,
        }
        metrics.append(row)
        if log:
            log(row)
        for k in loss_sums:
            loss_sums[k] = 0.0
        loss_count = 0
        returns = []

    for step in range(1, cfg.total_steps + 1):
        if step <= cfg.warmup_random_steps:
            action = rng.uniform(-1.0, 1.0, size=spec.action_size)
        else:
            action = agent.act(obs, rng=rng, deterministic=False)
        res = env.step(action)
        episode.actions.append(np.asarray(action, dtype=float))
        episode.rewards.append(res.reward)
        episode.configs.append(res.q.copy())
        episode.collided.append(res.collided)
        episode.reached.append(res.reached_goal)
        episode.observations.append(res.observation)

        if res.terminal:
            episode.success = bool(res.reached_goal)
            buffer.add_many(her_relabel(episode, env.cspace, env.cfg, rng,
                                        fraction=cfg.her_fraction,
                                        strategy=cfg.her_strategy))
            returns.append(float(np.sum(episode.rewards)))
            obs = env.reset()
            episode = Episode(goal=env.goal.copy())
            episode.observations.append(obs)
            episode.configs.append(env.q.copy())
        else:
            obs = res.observation

        if step > cfg.warmup_steps and len(buffer) >= cfg.batch_size:
            update_debt += cfg.updates_per_step
            while update_debt >= 1.0:
                losses = agent.update(buffer.sample(cfg.batch_size, rng), rng)
                for k in loss_sums:
                    loss_sums[k] += losses[k]
                loss_count += 1
                update_debt -= 1.0

        if step % cfg.eval_every == 0 or step == cfg.total_steps:
            flush_eval(step)
            if metrics_path:
                write_metrics_csv(metrics_path, metrics)

    if metrics_path:
        write_metrics_csv(metrics_path, metrics)
    return metrics


def write_metrics_csv(path, metrics):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_FIELDS)
        writer.writeheader()
        for row in metrics:
            writer.writerow({k: repr(row[k]) if isinstance(row[k], float)
                             else row[k] for k in METRIC_FIELDS})
