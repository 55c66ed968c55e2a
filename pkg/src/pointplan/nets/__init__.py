"""Minimal differentiable-network stack (numpy, float64)."""

from .encoders import CNNEncoder, FlattenEncoder, PointNetEncoder
from .heads import (
    LOG_STD_MAX,
    LOG_STD_MIN,
    CriticHead,
    TanhGaussianHead,
    squash_sample,
)
from .layers import MLP, elu, elu_grad
from .models import (
    DEFAULT_NET_CONFIG,
    GaussianPolicy,
    ObsSpec,
    batch_of_observation,
    build_encoder,
    head_input,
    head_input_size,
    obs_spec_for_env,
    split_head_input_grad,
)
from .params import ParamBuilder, ParamStore, load_checkpoint, save_checkpoint

__all__ = [
    "CNNEncoder", "FlattenEncoder", "PointNetEncoder", "LOG_STD_MAX",
    "LOG_STD_MIN", "CriticHead", "TanhGaussianHead", "squash_sample", "MLP",
    "elu", "elu_grad", "DEFAULT_NET_CONFIG", "GaussianPolicy", "ObsSpec",
    "batch_of_observation", "build_encoder", "head_input", "head_input_size",
    "obs_spec_for_env", "split_head_input_grad", "ParamBuilder", "ParamStore",
    "load_checkpoint", "save_checkpoint",
]
