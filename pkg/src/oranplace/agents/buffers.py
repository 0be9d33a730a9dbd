"""On-policy rollout storage with GAE, and a DDPG replay ring."""

from __future__ import annotations

import numpy as np


class RolloutBuffer:
    """Fixed-horizon storage for vectorized on-policy collection.

    Observations and masks are stored as named arrays so flat and graph
    front ends share one buffer. `dones` marks steps that ended an episode
    (terminated or truncated); advantage estimation cuts both the bootstrap
    and the GAE recursion there, so no value flows across episode
    boundaries.
    """

    def __init__(
        self,
        horizon: int,
        n_envs: int,
        obs_shapes: dict[str, tuple[int, ...]],
        mask_shapes: dict[str, tuple[int, ...]],
        n_action_heads: int,
    ):
        self.horizon = horizon
        self.n_envs = n_envs
        self.obs = {
            name: np.zeros((horizon, n_envs, *shape), dtype=np.float32)
            for name, shape in obs_shapes.items()
        }
        self.masks = {
            name: np.zeros((horizon, n_envs, *shape), dtype=bool)
            for name, shape in mask_shapes.items()
        }
        self.actions = np.zeros((horizon, n_envs, n_action_heads), dtype=np.int64)
        self.log_probs = np.zeros((horizon, n_envs), dtype=np.float64)
        self.values = np.zeros((horizon, n_envs), dtype=np.float64)
        self.rewards = np.zeros((horizon, n_envs), dtype=np.float64)
        self.dones = np.zeros((horizon, n_envs), dtype=bool)
        self.advantages = np.zeros((horizon, n_envs), dtype=np.float64)
        self.returns = np.zeros((horizon, n_envs), dtype=np.float64)
        self._pos = 0

    @property
    def size(self) -> int:
        return self._pos * self.n_envs

    def add(
        self,
        obs: dict[str, np.ndarray],
        masks: dict[str, np.ndarray],
        actions: np.ndarray,
        log_probs: np.ndarray,
        values: np.ndarray,
        rewards: np.ndarray,
        dones: np.ndarray,
    ) -> None:
        if self._pos >= self.horizon:
            raise RuntimeError("rollout buffer is full")
        t = self._pos
        for name, value in obs.items():
            self.obs[name][t] = value
        for name, value in masks.items():
            self.masks[name][t] = value
        self.actions[t] = actions
        self.log_probs[t] = log_probs
        self.values[t] = values
        self.rewards[t] = rewards
        self.dones[t] = dones
        self._pos += 1

    def compute_advantages(self, last_values: np.ndarray, gamma: float, gae_lambda: float) -> None:
        """Backward GAE pass; `last_values` bootstraps unfinished tails only."""
        if self._pos != self.horizon:
            raise RuntimeError(f"buffer holds {self._pos} of {self.horizon} steps")
        running = np.zeros(self.n_envs)
        for t in reversed(range(self.horizon)):
            next_values = self.values[t + 1] if t + 1 < self.horizon else last_values
            nonterminal = 1.0 - self.dones[t].astype(np.float64)
            delta = self.rewards[t] + gamma * next_values * nonterminal - self.values[t]
            running = delta + gamma * gae_lambda * nonterminal * running
            self.advantages[t] = running
        self.returns = self.advantages + self.values

    def flattened(self) -> dict[str, np.ndarray]:
        """Merge time and env axes into one batch axis."""
        out: dict[str, np.ndarray] = {}
        for name, arr in self.obs.items():
            out[f"obs_{name}"] = arr.reshape(-1, *arr.shape[2:])
        for name, arr in self.masks.items():
            out[f"mask_{name}"] = arr.reshape(-1, *arr.shape[2:])
        out["actions"] = self.actions.reshape(-1, self.actions.shape[-1])
        for name in ("log_probs", "values", "advantages", "returns"):
            out[name] = getattr(self, name).reshape(-1)
        return out


class ReplayBuffer:
    """Uniform-sampling transition ring for off-policy training."""

    def __init__(self, capacity: int, obs_dim: int, action_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.actions = np.zeros((capacity, action_dim), dtype=np.float32)
        self.rewards = np.zeros(capacity, dtype=np.float64)
        self.next_obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.dones = np.zeros(capacity, dtype=bool)
        self._pos = 0
        self._full = False

    def __len__(self) -> int:
        return self.capacity if self._full else self._pos

    def push(
        self,
        obs: np.ndarray,
        action: np.ndarray,
        reward: float,
        next_obs: np.ndarray,
        done: bool,
    ) -> None:
        i = self._pos
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = done
        self._pos = (self._pos + 1) % self.capacity
        self._full = self._full or self._pos == 0

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
        idx = rng.integers(len(self), size=batch_size)
        return {
            "obs": self.obs[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "next_obs": self.next_obs[idx],
            "dones": self.dones[idx],
        }
