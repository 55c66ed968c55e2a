"""Goal-conditioned SAC with hindsight experience replay."""

from .her import her_relabel
from .replay import ReplayBuffer
from .sac import SACAgent, SACConfig
from .training import (
    METRIC_FIELDS,
    evaluate_policy,
    generate_eval_problems,
    train_sac,
    write_metrics_csv,
)

__all__ = [
    "her_relabel", "ReplayBuffer", "SACAgent", "SACConfig", "METRIC_FIELDS",
    "evaluate_policy", "generate_eval_problems", "train_sac",
    "write_metrics_csv",
]
