"""Behavioral cloning: L2 regression of expert actions.

This module never touches the collision checker; the imitator only ever
sees recorded observation-action pairs.
"""

import numpy as np

from ..nets.models import GaussianPolicy

BC_LEARNING_RATE = 1e-3
BC_BATCH_SIZE = 256


def bc_loss_and_grads(policy: GaussianPolicy, obs_batch, expert_actions):
    """Mean squared error between expert actions and the deterministic
    policy output; accumulates parameter gradients."""
    expert_actions = np.asarray(expert_actions, dtype=np.float64)
    actions, _, cache = policy.forward(obs_batch, deterministic=True)
    if actions.shape != expert_actions.shape:
        raise ValueError(
            f"action shape {actions.shape} != expert {expert_actions.shape}")
    diff = actions - expert_actions
    loss = float(np.mean(diff ** 2))
    d_action = 2.0 * diff / diff.size
    policy.backward(cache, d_action=d_action)
    return loss


def bc_update(policy: GaussianPolicy, obs_batch, expert_actions,
              lr=BC_LEARNING_RATE):
    """One Adam step on the cloning loss; returns the (pre-step) loss."""
    loss = bc_loss_and_grads(policy, obs_batch, expert_actions)
    policy.store.adam_update(lr)
    return loss


def train_bc(policy: GaussianPolicy, demos, epochs, rng,
             batch_size=BC_BATCH_SIZE, lr=BC_LEARNING_RATE, log=None):
    """Epochs of shuffled minibatch cloning; returns per-epoch mean losses."""
    n = len(demos)
    history = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n - batch_size + 1, batch_size):
            idx = order[start:start + batch_size]
            obs_batch, actions = demos.batch(idx)
            obs_batch = {k: np.asarray(v, dtype=np.float64)
                         for k, v in obs_batch.items()}
            losses.append(bc_update(policy, obs_batch, actions, lr=lr))
        history.append(float(np.mean(losses)) if losses else np.nan)
        if log:
            log({"epoch": epoch, "bc_loss": history[-1]})
    return history
