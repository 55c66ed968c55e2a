"""Environment configuration."""

from dataclasses import dataclass, field, asdict

REPRESENTATIONS = ("image", "interior", "boundary", "boundary_normals")
OBSERVABILITIES = ("global", "local")


@dataclass
class EnvConfig:
    """Knobs of the goal-conditioned planning environment.

    Reward signs follow the task reward definition: positive bonus at the
    goal, small negative per free step, larger negative on collision. The
    defaults are the documented baseline; reward magnitudes, the goal
    tolerance and the speed caps are not pinned by any external source.
    """

    reward_goal: float = 1.0
    reward_free: float = -0.05
    reward_collision: float = -1.0
    goal_tolerance: float = 0.05
    max_linear_speed: float = 0.15
    max_angular_speed: float = 0.4
    rotation_weight: float = 0.2  # configuration-metric weight per radian
    substep: float = 0.01
    max_steps: int = 50
    cloud_size: int = 128
    representation: str = "boundary_normals"
    observability: str = "global"
    ray_count: int = 256
    image_resolution: int = 64
    min_start_goal_distance_factor: float = 4.0  # times goal_tolerance

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"representation must be one of {REPRESENTATIONS}")
        if self.observability not in OBSERVABILITIES:
            raise ValueError(f"observability must be one of {OBSERVABILITIES}")
        if not (self.reward_goal > 0 and self.reward_free < 0 and self.reward_collision < 0):
            raise ValueError("reward signs must satisfy goal > 0 > free, collision")
        if self.goal_tolerance <= 0 or self.substep <= 0:
            raise ValueError("goal tolerance and substep must be positive")
        if self.max_steps < 1 or self.cloud_size < 1 or self.ray_count < 1:
            raise ValueError("step, cloud and ray counts must be positive")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)
