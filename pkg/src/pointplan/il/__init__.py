"""Expert demonstrations from planner solutions, behavioral cloning."""

from .bc import BC_BATCH_SIZE, BC_LEARNING_RATE, bc_loss_and_grads, bc_update, train_bc
from .demos import DemoSet, collect_demos, env_fingerprint, path_to_pairs

__all__ = [
    "BC_BATCH_SIZE", "BC_LEARNING_RATE", "bc_loss_and_grads", "bc_update",
    "train_bc", "DemoSet", "collect_demos", "env_fingerprint", "path_to_pairs",
]
