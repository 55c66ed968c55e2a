"""Goal-conditioned Soft Actor-Critic with automatic entropy tuning.

One obstacle encoder is shared by the actor and both critics and receives
gradients from both losses; target copies of the encoder and critic heads
are tracked with polyak averaging.
"""

from dataclasses import dataclass, field, asdict

import numpy as np

from ..nets.encoders import FlattenEncoder
from ..nets.heads import CriticHead, TanhGaussianHead
from ..nets.models import (
    ObsSpec,
    build_encoder,
    head_input,
    head_input_size,
)
from ..nets.params import ParamBuilder, load_checkpoint, save_checkpoint


@dataclass
class SACConfig:
    """Algorithm constants. Pinned by the training recipe: lr 3e-4, batch
    256, replay capacity 1e6, 80% hindsight relabeling. Discount, polyak
    rate, and the initial temperature follow common defaults; they are
    assumptions, not published values."""

    lr: float = 3e-4
    batch_size: int = 256
    discount: float = 0.99
    polyak: float = 0.005
    target_entropy: float = None      # defaults to -action_size
    init_alpha: float = 0.1           # matched to the unit-scale rewards
    buffer_capacity: int = 1_000_000
    her_fraction: float = 0.8
    her_strategy: str = "future"
    updates_per_step: float = 1.0
    warmup_steps: int = 1000          # env steps before updates begin
    warmup_random_steps: int = 0      # env steps with uniform actions
    total_steps: int = 300_000
    eval_every: int = 10_000
    eval_episodes: int = 100

    def __post_init__(self):
        if not 0.0 < self.discount < 1.0:
            raise ValueError("discount must lie in (0, 1)")
        if not 0.0 < self.polyak <= 1.0:
            raise ValueError("polyak rate must lie in (0, 1]")
        if not 0.0 <= self.her_fraction <= 1.0:
            raise ValueError("relabel fraction must lie in [0, 1]")

    def to_dict(self):
        return asdict(self)


class SACAgent:
    """Actor, twin critics, shared encoder, and temperature."""

    def __init__(self, obs_spec: ObsSpec, net_cfg, sac_cfg: SACConfig, rng):
        self.obs_spec = obs_spec
        self.net_cfg = dict(net_cfg)
        self.cfg = sac_cfg
        self.target_entropy = (sac_cfg.target_entropy
                               if sac_cfg.target_entropy is not None
                               else -float(obs_spec.action_size))

        enc_builder = ParamBuilder(rng)
        self.encoder = build_encoder(enc_builder, self.net_cfg, obs_spec)
        self.enc_store = enc_builder.build()
        self.encoder.bind(self.enc_store)

        head_hidden = self.net_cfg.get("head_hidden", [256, 256, 256])
        in_actor = head_input_size(self.encoder, obs_spec)
        actor_builder = ParamBuilder(rng)
        self.actor = TanhGaussianHead(actor_builder, in_actor, head_hidden,
                                      obs_spec.action_size, prefix="actor")
        self.actor_store = actor_builder.build()
        self.actor.bind(self.actor_store)

        in_critic = in_actor + obs_spec.action_size
        critic_builder = ParamBuilder(rng)
        self.critics = (CriticHead(critic_builder, in_critic, head_hidden, "q1"),
                        CriticHead(critic_builder, in_critic, head_hidden, "q2"))
        self.critic_store = critic_builder.build()
        for c in self.critics:
            c.bind(self.critic_store)

        # target copies start equal to the mains
        self.target_enc_store = self.enc_store.clone()
        self.target_encoder = self._clone_encoder().bind(self.target_enc_store)
        self.target_critic_store = self.critic_store.clone()
        self.target_critics = (
            CriticHead(self.critic_store, in_critic, head_hidden, "q1")
            .bind(self.target_critic_store),
            CriticHead(self.critic_store, in_critic, head_hidden, "q2")
            .bind(self.target_critic_store))

        alpha_builder = ParamBuilder(rng)
        alpha_builder.scalar("log_alpha", np.log(sac_cfg.init_alpha))
        self.alpha_store = alpha_builder.build()

    def _clone_encoder(self):
        if isinstance(self.encoder, FlattenEncoder):
            return self.encoder
        dummy = ParamBuilder(np.random.default_rng(0))
        return build_encoder(dummy, self.net_cfg, self.obs_spec)

    # ------------------------------------------------------------- inference

    @property
    def alpha(self):
        return float(np.exp(self.alpha_store.view("log_alpha")[0]))

    def act_batch(self, obs_batch, rng=None, deterministic=False):
        feat, _ = self.encoder.forward(obs_batch)
        a, _, _ = self.actor.forward(head_input(feat, obs_batch), rng=rng,
                                     deterministic=deterministic)
        return a

    def act(self, obs, rng=None, deterministic=False):
        batch = {k: np.asarray(v, dtype=np.float64)[None, ...]
                 for k, v in obs.parts().items()}
        return self.act_batch(batch, rng=rng, deterministic=deterministic)[0]

    def policy_fn(self, rng=None, deterministic=True):
        return lambda obs: self.act(obs, rng=rng, deterministic=deterministic)

    # -------------------------------------------------------------- training

    def critic_targets(self, batch, rng):
        """Bellman targets y = r + discount * (1 - terminal) *
        (min target Q(o', a') - alpha * log pi(a'|o')), a' ~ pi(.|o')."""
        next_obs = batch["next_obs"]
        feat2, _ = self.encoder.forward(next_obs)
        a2, logp2, _ = self.actor.forward(head_input(feat2, next_obs), rng=rng)
        tfeat2, _ = self.target_encoder.forward(next_obs)
        xq2 = np.concatenate([head_input(tfeat2, next_obs), a2], axis=1)
        q1t, _ = self.target_critics[0].forward(xq2)
        q2t, _ = self.target_critics[1].forward(xq2)
        soft_q = np.minimum(q1t, q2t) - self.alpha * logp2
        return (batch["reward"]
                + self.cfg.discount * (1.0 - batch["terminal"]) * soft_q)

    def update(self, batch, rng):
        """One gradient update of critics, actor, temperature, targets."""
        y = self.critic_targets(batch, rng)
        report = self.accumulate_gradients(batch, y, rng)
        if not (np.isfinite(report["critic_loss"])
                and np.isfinite(report["actor_loss"])):
            raise FloatingPointError(
                f"diverged: critic {report['critic_loss']}, "
                f"actor {report['actor_loss']}")
        lr = self.cfg.lr
        self.critic_store.adam_update(lr)
        self.actor_store.adam_update(lr)
        if self.enc_store.size:
            self.enc_store.adam_update(lr)
        self.alpha_store.adam_update(lr)

        tau = self.cfg.polyak
        self.target_critic_store.polyak_from(self.critic_store, tau)
        if self.enc_store.size:
            self.target_enc_store.polyak_from(self.enc_store, tau)
        return report

    def accumulate_gradients(self, batch, y, rng):
        """Accumulate critic, actor, and temperature gradients.

        Per SAC's stop-gradient structure: critic parameters receive only
        the Bellman regression gradient (y frozen), actor parameters only
        the policy-improvement gradient, and the shared encoder the sum of
        both losses' gradients.
        """
        obs = batch["obs"]
        b = len(batch["reward"])
        feat, enc_cache = self.encoder.forward(obs)
        x_head = head_input(feat, obs)
        fdim = self.encoder.feat_dim

        # critic regression on stored actions
        xq = np.concatenate([x_head, batch["action"]], axis=1)
        q1, c1 = self.critics[0].forward(xq)
        q2, c2 = self.critics[1].forward(xq)
        critic_loss = float(np.mean((q1 - y) ** 2 + (q2 - y) ** 2))
        d_feat = np.zeros((b, fdim))
        dx1 = self.critics[0].backward(c1, 2.0 * (q1 - y) / b)
        dx2 = self.critics[1].backward(c2, 2.0 * (q2 - y) / b)
        d_feat += dx1[:, :fdim] + dx2[:, :fdim]

        # actor loss through fresh actions
        a_pi, logp_pi, actor_cache = self.actor.forward(x_head, rng=rng)
        xq_pi = np.concatenate([x_head, a_pi], axis=1)
        q1_pi, c1p = self.critics[0].forward(xq_pi)
        q2_pi, c2p = self.critics[1].forward(xq_pi)
        q_min = np.minimum(q1_pi, q2_pi)
        alpha = self.alpha
        actor_loss = float(np.mean(alpha * logp_pi - q_min))
        pick1 = q1_pi <= q2_pi
        dq = -1.0 / b
        d_xq_pi = (self.critics[0].backward(c1p, np.where(pick1, dq, 0.0),
                                            accumulate=False)
                   + self.critics[1].backward(c2p, np.where(pick1, 0.0, dq),
                                              accumulate=False))
        d_feat += d_xq_pi[:, :fdim]
        d_action = d_xq_pi[:, x_head.shape[1]:]
        d_x_actor = self.actor.backward(actor_cache, d_action=d_action,
                                        d_logp=np.full(b, alpha / b))
        d_feat += d_x_actor[:, :fdim]

        self.encoder.backward(enc_cache, d_feat)

        # temperature: minimize -log_alpha * mean(logp + target_entropy)
        alpha_err = float(np.mean(logp_pi + self.target_entropy))
        self.alpha_store.grad_view("log_alpha")[0] += -alpha_err

        return {"critic_loss": critic_loss, "actor_loss": actor_loss,
                "alpha": alpha, "mean_q": float(np.mean(q_min)),
                "mean_target": float(np.mean(y))}

    # --------------------------------------------------------------- storage

    def stores(self):
        return {"encoder": self.enc_store, "actor": self.actor_store,
                "critic": self.critic_store,
                "target_encoder": self.target_enc_store,
                "target_critic": self.target_critic_store,
                "alpha": self.alpha_store}

    def save(self, path, extra_config=None):
        cfg = {"net": self.net_cfg, "obs_spec": vars(self.obs_spec),
               "sac": self.cfg.to_dict()}
        if extra_config:
            cfg.update(extra_config)
        save_checkpoint(path, self.stores(), config=cfg)

    @classmethod
    def load(cls, path):
        stores, cfg = load_checkpoint(path)
        agent = cls(ObsSpec(**cfg["obs_spec"]), cfg["net"],
                    SACConfig(**cfg["sac"]), np.random.default_rng(0))
        for name, store in agent.stores().items():
            store.data[:] = stores[name].data
            store.adam_m[:] = stores[name].adam_m
            store.adam_v[:] = stores[name].adam_v
            store.adam_step_count = stores[name].adam_step_count
        return agent, cfg
