"""Network assembly: observation specs, encoder construction, policies."""

from dataclasses import dataclass

import numpy as np

from .encoders import CNNEncoder, FlattenEncoder, PointNetEncoder
from .heads import TanhGaussianHead
from .params import ParamBuilder, load_checkpoint, save_checkpoint


@dataclass(frozen=True)
class ObsSpec:
    """Shapes of one observation and the action it conditions."""

    goal_size: int
    action_size: int
    cloud_points: int = 0
    point_size: int = 0
    image_resolution: int = 0
    state_size: int = 0

    def parts_shapes(self):
        shapes = {"goal": (self.goal_size,)}
        if self.cloud_points:
            shapes["cloud"] = (self.cloud_points, self.point_size)
        if self.image_resolution:
            shapes["image"] = (self.image_resolution, self.image_resolution)
        if self.state_size:
            shapes["state"] = (self.state_size,)
        return shapes


def obs_spec_for_env(env):
    """Observation/action shapes implied by a PlanningEnv."""
    from ..envs.observation import point_feature_size

    cfg, cs = env.cfg, env.cspace
    if cfg.representation == "image" and cfg.observability == "global":
        return ObsSpec(goal_size=cs.goal_size, action_size=cs.action_size,
                       image_resolution=cfg.image_resolution,
                       state_size=cs.dim)
    pf = point_feature_size(cs.dim, cfg.representation, cfg.observability)
    return ObsSpec(goal_size=cs.goal_size, action_size=cs.action_size,
                   cloud_points=cfg.cloud_size, point_size=pf)


DEFAULT_NET_CONFIG = {
    "kind": "pointnet",            # pointnet | mlp | cnn
    "point_hidden": [256, 256],    # hidden layers of the per-point network
    "feature_size": 256,           # pooled feature width
    "head_hidden": [256, 256, 256],
}


def build_encoder(builder, net_cfg, obs_spec):
    kind = net_cfg.get("kind", "pointnet")
    if kind == "pointnet":
        return PointNetEncoder(builder, obs_spec.point_size,
                               net_cfg.get("point_hidden", [256, 256]),
                               net_cfg.get("feature_size", 256))
    if kind == "mlp":
        return FlattenEncoder(obs_spec.cloud_points, obs_spec.point_size)
    if kind == "cnn":
        return CNNEncoder(builder, obs_spec.image_resolution,
                          channels=net_cfg.get("cnn_channels", 32))
    raise ValueError(f"unknown network kind {kind!r}")


def head_input(feat, batch):
    parts = [feat, np.asarray(batch["goal"], dtype=np.float64)]
    if "state" in batch:
        parts.append(np.asarray(batch["state"], dtype=np.float64))
    return np.concatenate(parts, axis=1)


def head_input_size(encoder, obs_spec):
    return encoder.feat_dim + obs_spec.goal_size + obs_spec.state_size


def split_head_input_grad(d_in, encoder, obs_spec):
    """Feature part of a head-input gradient (goal/state carry no params)."""
    return d_in[:, : encoder.feat_dim]


def batch_of_observation(obs):
    """Batch (size 1) view of a single Observation."""
    return {k: np.asarray(v, dtype=np.float64)[None, ...]
            for k, v in obs.parts().items()}


class GaussianPolicy:
    """Encoder plus tanh-Gaussian head in one parameter store.

    This is the standalone goal-conditioned policy used for behavioral
    cloning and for evaluating checkpoints; SAC wires the same pieces
    across several stores instead.
    """

    def __init__(self, obs_spec, net_cfg, rng):
        self.obs_spec = obs_spec
        self.net_cfg = dict(net_cfg)
        builder = ParamBuilder(rng)
        self.encoder = build_encoder(builder, self.net_cfg, obs_spec)
        in_dim = head_input_size(self.encoder, obs_spec)
        self.head = TanhGaussianHead(builder, in_dim,
                                     self.net_cfg.get("head_hidden", [256] * 3),
                                     obs_spec.action_size)
        self.store = builder.build()
        self.encoder.bind(self.store)
        self.head.bind(self.store)

    def forward(self, batch, rng=None, deterministic=True):
        feat, enc_cache = self.encoder.forward(batch)
        x = head_input(feat, batch)
        action, log_prob, head_cache = self.head.forward(
            x, rng=rng, deterministic=deterministic)
        return action, log_prob, (enc_cache, head_cache)

    def backward(self, cache, d_action=None, d_logp=None):
        enc_cache, head_cache = cache
        d_in = self.head.backward(head_cache, d_action=d_action, d_logp=d_logp)
        d_feat = split_head_input_grad(d_in, self.encoder, self.obs_spec)
        self.encoder.backward(enc_cache, d_feat)

    def act(self, obs, rng=None, deterministic=True):
        batch = batch_of_observation(obs)
        action, _, _ = self.forward(batch, rng=rng, deterministic=deterministic)
        return action[0]

    def policy_fn(self, rng=None, deterministic=True):
        return lambda obs: self.act(obs, rng=rng, deterministic=deterministic)

    # -------------------------------------------------------------- storage

    def config_dict(self):
        return {"net": self.net_cfg, "obs_spec": vars(self.obs_spec)}

    def save(self, path, extra_config=None):
        cfg = self.config_dict()
        if extra_config:
            cfg.update(extra_config)
        save_checkpoint(path, {"policy": self.store}, config=cfg)

    @classmethod
    def load(cls, path):
        stores, cfg = load_checkpoint(path)
        policy = cls(ObsSpec(**cfg["obs_spec"]), cfg["net"],
                     np.random.default_rng(0))
        policy.store.data[:] = stores["policy"].data
        policy.store.adam_m[:] = stores["policy"].adam_m
        policy.store.adam_v[:] = stores["policy"].adam_v
        policy.store.adam_step_count = stores["policy"].adam_step_count
        return policy, cfg
