"""Policy and value heads: tanh-squashed Gaussian actor and scalar critic."""

import numpy as np

from .layers import MLP

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0


def softplus(x):
    return np.logaddexp(0.0, x)


def tanh_gaussian_log_prob(log_std, z, noise):
    """Log-density of a = tanh(z), z = mean + std * noise, summed over the
    last axis. Uses the stable identity
    log(1 - tanh^2 z) = 2 (log 2 - z - softplus(-2z))."""
    per_dim = (-0.5 * noise ** 2 - 0.5 * np.log(2.0 * np.pi) - log_std
               - 2.0 * (np.log(2.0) - z - softplus(-2.0 * z)))
    return per_dim.sum(axis=-1)


def squash_sample(mean, log_std, rng=None, deterministic=False):
    """Sample a tanh-squashed Gaussian action with its log-probability.

    Returns (action, log_prob, noise); deterministic mode returns
    tanh(mean) with log_prob = None.
    """
    mean = np.asarray(mean, dtype=np.float64)
    if deterministic:
        return np.tanh(mean), None, None
    log_std = np.clip(log_std, LOG_STD_MIN, LOG_STD_MAX)
    std = np.exp(log_std)
    noise = rng.standard_normal(mean.shape)
    z = mean + std * noise
    return np.tanh(z), tanh_gaussian_log_prob(log_std, z, noise), noise


class TanhGaussianHead:
    """MLP producing (mean, log_std), squashed by tanh.

    The final layer is initialized near zero so the untrained policy acts
    close to rest.
    """

    def __init__(self, builder, in_dim, hidden, action_dim, prefix="actor"):
        self.action_dim = action_dim
        self.mlp = MLP(builder, prefix, in_dim, list(hidden), 2 * action_dim,
                       final_scale=0.01)

    def bind(self, store):
        self.mlp.bind(store)
        return self

    def forward(self, x, rng=None, deterministic=False):
        out, mlp_cache = self.mlp.forward(x)
        mean = out[:, : self.action_dim]
        raw_ls = out[:, self.action_dim:]
        log_std = np.clip(raw_ls, LOG_STD_MIN, LOG_STD_MAX)
        clip_pass = (raw_ls > LOG_STD_MIN) & (raw_ls < LOG_STD_MAX)
        action, log_prob, noise = squash_sample(mean, log_std, rng=rng,
                                                deterministic=deterministic)
        cache = (mlp_cache, log_std, clip_pass, noise, action, deterministic)
        return action, log_prob, cache

    def backward(self, cache, d_action=None, d_logp=None, accumulate=True):
        """Backprop through sampling (reparameterized) and the MLP.

        d_action: [B, A] gradient on the squashed action; d_logp: [B]
        gradient on the log-probability. Returns the input gradient.
        """
        mlp_cache, log_std, clip_pass, noise, action, deterministic = cache
        b = action.shape[0]
        one_m_a2 = 1.0 - action ** 2
        d_mean = np.zeros_like(action)
        d_ls = np.zeros_like(action)
        if d_action is not None:
            d_mean += d_action * one_m_a2
        if deterministic:
            if d_logp is not None:
                raise ValueError("no log-prob path in deterministic mode")
        else:
            std_noise = np.exp(log_std) * noise
            if d_action is not None:
                d_ls += d_action * one_m_a2 * std_noise
            if d_logp is not None:
                dl = np.asarray(d_logp, dtype=np.float64).reshape(b, 1)
                d_mean += dl * (2.0 * action)
                d_ls += dl * (-1.0 + 2.0 * action * std_noise)
        d_out = np.concatenate([d_mean, np.where(clip_pass, d_ls, 0.0)], axis=1)
        return self.mlp.backward(mlp_cache, d_out, accumulate=accumulate)


class CriticHead:
    """MLP mapping (features ++ goal ++ action) to a scalar value."""

    def __init__(self, builder, in_dim, hidden, prefix="critic"):
        self.mlp = MLP(builder, prefix, in_dim, list(hidden), 1)

    def bind(self, store):
        self.mlp.bind(store)
        return self

    def forward(self, x):
        out, cache = self.mlp.forward(x)
        return out[:, 0], cache

    def backward(self, cache, d_q, accumulate=True):
        return self.mlp.backward(cache, np.asarray(d_q)[:, None],
                                 accumulate=accumulate)
