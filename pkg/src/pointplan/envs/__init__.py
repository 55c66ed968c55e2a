"""Goal-conditioned motion-planning environments."""

from .config import EnvConfig, OBSERVABILITIES, REPRESENTATIONS
from .cspace import ConfigSpace
from .generators import (
    FAMILIES,
    EnvFamily,
    SamplingSaturationError,
    gen_2d_narrow,
    gen_3d_boxes,
    gen_3d_dynamic,
    gen_3d_synthetic,
    gen_slot,
    get_family,
    sample_free,
    sample_problem,
)
from .observation import Observation, observe, point_feature_size
from .planning_env import (
    Episode,
    PlanningEnv,
    Problem,
    StepResult,
    clip_motion,
    episode_records,
    export_episodes_jsonl,
    rollout,
    straight_line_policy,
    task_reward,
)

__all__ = [
    "EnvConfig", "OBSERVABILITIES", "REPRESENTATIONS", "ConfigSpace",
    "FAMILIES", "EnvFamily", "SamplingSaturationError", "gen_2d_narrow",
    "gen_3d_boxes", "gen_3d_dynamic", "gen_3d_synthetic", "gen_slot",
    "get_family", "sample_free", "sample_problem", "Observation", "observe",
    "point_feature_size", "Episode", "PlanningEnv", "Problem", "StepResult",
    "clip_motion", "episode_records", "export_episodes_jsonl", "rollout",
    "straight_line_policy", "task_reward",
]
