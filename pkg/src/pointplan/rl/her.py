"""Hindsight goal relabeling.

Episodes are relabeled before insertion into replay: a transition keeps
its motion, action, and obstacle cloud; only the goal channel, reward,
and terminal flag are rewritten against a substitute goal achieved later
in the same episode.
"""

import numpy as np

from ..envs.planning_env import task_reward


def _transition(episode, t, goal_channel_t, goal_channel_t1, reward, terminal):
    obs = dict(episode.observations[t].parts())
    nxt = dict(episode.observations[t + 1].parts())
    obs["goal"] = goal_channel_t
    nxt["goal"] = goal_channel_t1
    return {"obs": obs, "action": episode.actions[t], "reward": reward,
            "next_obs": nxt, "terminal": terminal}


def _recompute(episode, t, new_goal, cspace, cfg):
    q_t = episode.configs[t]
    q_t1 = episode.configs[t + 1]
    lin, ang = cspace.twist_of_action(episode.actions[t],
                                      cfg.max_linear_speed,
                                      cfg.max_angular_speed)
    reached = cspace.distance(q_t1, new_goal) <= cfg.goal_tolerance
    reward = -cspace.twist_norm(lin, ang) + task_reward(
        cfg, reached, episode.collided[t])
    terminal = reached or (t + 1) >= cfg.max_steps
    return (cspace.local_goal(q_t, new_goal),
            cspace.local_goal(q_t1, new_goal), reward, terminal)


def her_relabel(episode, cspace, cfg, rng, fraction=0.8, strategy="future"):
    """Transitions of an episode with hindsight goal substitution.

    strategy "future": each transition is independently relabeled (with
    probability `fraction`) to a goal achieved at or after its own step.
    strategy "rollout": with probability `fraction` the whole episode is
    relabeled to one of its achieved configurations.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("relabel fraction must lie in [0, 1]")
    if strategy not in ("future", "rollout"):
        raise ValueError(f"unknown HER strategy {strategy!r}")
    n = episode.length
    out = []
    episode_goal = None
    if strategy == "rollout" and n > 0 and rng.random() < fraction:
        episode_goal = episode.configs[int(rng.integers(1, n + 1))]
    for t in range(n):
        new_goal = None
        if strategy == "future":
            if rng.random() < fraction:
                new_goal = episode.configs[int(rng.integers(t + 1, n + 1))]
        else:
            new_goal = episode_goal
        if new_goal is None:
            out.append(_transition(
                episode, t,
                episode.observations[t].goal, episode.observations[t + 1].goal,
                episode.rewards[t],
                episode.reached[t] or (t + 1) >= cfg.max_steps))
        else:
            g_t, g_t1, reward, terminal = _recompute(episode, t, new_goal,
                                                     cspace, cfg)
            out.append(_transition(episode, t, g_t, g_t1, reward, terminal))
    return out
