"""Uniform ring-buffer replay.

Bulk observation channels (clouds, images) are stored as float32 to keep
desk-scale buffers in RAM; samples are promoted back to float64 for the
networks. Goal, action, and reward channels stay float64.
"""

import numpy as np

BULK_PARTS = ("cloud", "image")


class ReplayBuffer:
    """FIFO ring of transitions with uniform sampling.

    Arrays grow geometrically up to `capacity`, then wrap (oldest first).
    """

    def __init__(self, capacity, obs_shapes, action_size):
        self.capacity = int(capacity)
        self.obs_shapes = dict(obs_shapes)
        self.action_size = int(action_size)
        self._arrays = {}
        self._alloc = 0
        self._next = 0
        self._size = 0

    def __len__(self):
        return self._size

    def _dtype(self, part):
        return np.float32 if part in BULK_PARTS else np.float64

    def _ensure(self, n_more):
        needed = min(self.capacity, max(self._size + n_more, 1024))
        if needed <= self._alloc:
            return
        new_alloc = self._alloc if self._alloc else 1024
        while new_alloc < needed:
            new_alloc *= 2
        new_alloc = min(new_alloc, self.capacity)
        if not self._arrays:
            for part, shape in self.obs_shapes.items():
                self._arrays[part] = np.zeros((new_alloc, *shape),
                                              dtype=self._dtype(part))
                self._arrays["next_" + part] = np.zeros(
                    (new_alloc, *shape), dtype=self._dtype(part))
            self._arrays["action"] = np.zeros((new_alloc, self.action_size))
            self._arrays["reward"] = np.zeros(new_alloc)
            self._arrays["terminal"] = np.zeros(new_alloc)
        else:
            for key, arr in self._arrays.items():
                grown = np.zeros((new_alloc, *arr.shape[1:]), dtype=arr.dtype)
                grown[: self._alloc] = arr
                self._arrays[key] = grown
        self._alloc = new_alloc

    def add(self, transition):
        self._ensure(1)
        i = self._next
        for part in self.obs_shapes:
            self._arrays[part][i] = transition["obs"][part]
            self._arrays["next_" + part][i] = transition["next_obs"][part]
        self._arrays["action"][i] = transition["action"]
        self._arrays["reward"][i] = transition["reward"]
        self._arrays["terminal"][i] = float(transition["terminal"])
        self._next = (self._next + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def add_many(self, transitions):
        for t in transitions:
            self.add(t)

    def sample(self, batch_size, rng):
        if self._size == 0:
            raise ValueError("cannot sample from an empty replay buffer")
        idx = rng.integers(0, self._size, size=batch_size)
        batch = {"obs": {}, "next_obs": {}}
        for part in self.obs_shapes:
            batch["obs"][part] = self._arrays[part][idx].astype(np.float64)
            batch["next_obs"][part] = self._arrays["next_" + part][idx].astype(
                np.float64)
        batch["action"] = self._arrays["action"][idx].copy()
        batch["reward"] = self._arrays["reward"][idx].copy()
        batch["terminal"] = self._arrays["terminal"][idx].copy()
        return batch
