"""Clipped-surrogate policy optimization over multi-discrete actions.

One implementation serves three agent kinds that differ only in their
front end and mask handling:

  PPO   flat observations, no action masking (ablation baseline),
  MPPO  flat observations with hard action masking,
  GPPO  graph-encoder front end with hard action masking.

Rollouts store the masks used at sampling time so updates re-evaluate the
exact same restricted distributions.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from ..encoder import EncoderConfig, GraphEncoder
from .buffers import RolloutBuffer
from .distributions import MultiHeadCategorical
from .networks import IdentityFrontEnd, PolicyValueNet

PPO_KINDS = ("PPO", "MPPO", "GPPO")


@dataclass(frozen=True)
class PpoConfig:
    learning_rate: float = 1e-4
    batch_size: int = 128
    discount: float = 0.98
    gae_lambda: float = 0.97
    clip_range: float = 0.3
    entropy_coef: float = 1e-6
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    n_epochs: int = 10
    rollout_horizon: int = 128
    n_envs: int = 32
    policy_hidden: tuple[int, ...] = (256, 256)

    def validate(self) -> None:
        if self.learning_rate <= 0 or self.batch_size < 1:
            raise ValueError("learning_rate must be positive and batch_size at least 1")
        for name in ("discount", "gae_lambda"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.clip_range <= 0.0:
            raise ValueError("clip_range must be positive")
        if self.entropy_coef < 0.0 or self.value_coef < 0.0:
            raise ValueError("loss coefficients must be nonnegative")
        if min(self.n_epochs, self.rollout_horizon, self.n_envs) < 1:
            raise ValueError("n_epochs, rollout_horizon, n_envs must be at least 1")


def clipped_surrogate(ratio: torch.Tensor, advantages: torch.Tensor, clip_range: float) -> torch.Tensor:
    """Per-sample pessimistic surrogate min(r A, clip(r) A)."""
    clipped = torch.clamp(ratio, 1.0 - clip_range, 1.0 + clip_range)
    return torch.minimum(ratio * advantages, clipped * advantages)


class PpoAgent:
    """Multi-head PPO with optional masking and graph front end."""

    def __init__(
        self,
        env_info: dict,
        config: PpoConfig = PpoConfig(),
        kind: str = "MPPO",
        encoder_config: EncoderConfig = EncoderConfig(),
        seed: int = 0,
    ):
        if kind not in PPO_KINDS:
            raise ValueError(f"unknown PPO kind {kind!r}, expected one of {PPO_KINDS}")
        config.validate()
        self.kind = kind
        self.config = config
        self.encoder_config = encoder_config
        self.env_info = env_info
        self.masked = kind in ("MPPO", "GPPO")
        self.uses_graph = kind == "GPPO"
        self.seed = seed
        torch.manual_seed(seed)

        n_rh = env_info["n_rh"]
        group_sizes = (int(env_info["action_nvec"][0]), env_info["n_es"], env_info["n_rc"])
        if self.uses_graph:
            front = GraphEncoder(
                node_dim=env_info["node_feature_dim"],
                edge_dim=env_info["edge_feature_dim"],
                config=encoder_config,
            )
            self._edge_index = torch.as_tensor(env_info["edge_index"], dtype=torch.int64)
        else:
            front = IdentityFrontEnd(env_info["flat_dim"])
            self._edge_index = None
        self.net = PolicyValueNet(front, n_rh, group_sizes, hidden=config.policy_hidden)
        self.optimizer = torch.optim.Adam(self.net.parameters(), lr=config.learning_rate)
        self._shuffle_rng = np.random.default_rng(seed)
        self.n_rh = n_rh
        self.group_sizes = group_sizes

    # -- observation plumbing ------------------------------------------------

    def obs_arrays(self, observations: list) -> dict[str, np.ndarray]:
        if self.uses_graph:
            return {
                "node": np.stack([o.node_features for o in observations]),
                "edge": np.stack([o.edge_features for o in observations]),
            }
        return {"flat": np.stack([o.flat for o in observations])}

    def mask_arrays(self, masks: list) -> dict[str, np.ndarray]:
        if not self.masked:
            return {}
        return {
            "split": np.stack([m.split for m in masks]),
            "du": np.stack([m.du for m in masks]),
            "cu": np.stack([m.cu for m in masks]),
        }

    def _net_inputs(self, obs: dict[str, torch.Tensor]) -> tuple[torch.Tensor, ...]:
        if self.uses_graph:
            return obs["node"], self._edge_index, obs["edge"]
        return (obs["flat"],)

    def _mask_groups(self, masks: dict[str, torch.Tensor]) -> list[torch.Tensor] | None:
        if not self.masked:
            return None
        return [masks["split"], masks["du"], masks["cu"]]

    def distribution(
        self, obs: dict[str, torch.Tensor], masks: dict[str, torch.Tensor]
    ) -> tuple[MultiHeadCategorical, torch.Tensor]:
        groups, value = self.net(*self._net_inputs(obs))
        return MultiHeadCategorical(groups, self._mask_groups(masks)), value

    @staticmethod
    def _to_tensors(arrays: dict[str, np.ndarray]) -> dict[str, torch.Tensor]:
        return {name: torch.as_tensor(arr) for name, arr in arrays.items()}

    # -- acting ---------------------------------------------------------------

    def act_batch(
        self,
        obs_arrays: dict[str, np.ndarray],
        mask_arrays: dict[str, np.ndarray],
        deterministic: bool = False,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        with torch.no_grad():
            dist, value = self.distribution(
                self._to_tensors(obs_arrays), self._to_tensors(mask_arrays)
            )
            actions = dist.mode() if deterministic else dist.sample()
            log_prob = dist.log_prob(actions)
        return actions.numpy(), log_prob.numpy(), value.numpy()

    def policy(self, deterministic: bool = True):
        """Single-environment policy callable for evaluation."""

        def _policy(observation, mask) -> np.ndarray:
            actions, _, _ = self.act_batch(
                self.obs_arrays([observation]), self.mask_arrays([mask]), deterministic
            )
            return actions[0]

        return _policy

    # -- training -------------------------------------------------------------

    def collect(self, vec_env, horizon: int | None = None) -> tuple[RolloutBuffer, list[dict]]:
        """Roll the vectorized env forward and fill a fresh buffer."""
        horizon = horizon or self.config.rollout_horizon
        obs_shapes = {
            name: arr.shape[1:] for name, arr in self.obs_arrays(vec_env.observations).items()
        }
        mask_shapes = {
            name: arr.shape[1:] for name, arr in self.mask_arrays(vec_env.masks).items()
        }
        buffer = RolloutBuffer(
            horizon, len(vec_env), obs_shapes, mask_shapes, n_action_heads=3 * self.n_rh
        )
        events: list[dict] = []
        for _ in range(horizon):
            obs = self.obs_arrays(vec_env.observations)
            masks = self.mask_arrays(vec_env.masks)
            actions, log_probs, values = self.act_batch(obs, masks)
            rewards, dones, step_events = vec_env.step(actions)
            buffer.add(obs, masks, actions, log_probs, values, rewards, dones)
            events.extend(step_events)
        with torch.no_grad():
            _, last_values = self.distribution(
                self._to_tensors(self.obs_arrays(vec_env.observations)),
                self._to_tensors(self.mask_arrays(vec_env.masks)),
            )
        buffer.compute_advantages(last_values.numpy(), self.config.discount, self.config.gae_lambda)
        return buffer, events

    def update(self, buffer: RolloutBuffer) -> dict[str, float]:
        """Clipped-surrogate epochs over shuffled minibatches."""
        cfg = self.config
        data = buffer.flattened()
        n = data["actions"].shape[0]
        obs = {
            name.removeprefix("obs_"): torch.as_tensor(arr)
            for name, arr in data.items()
            if name.startswith("obs_")
        }
        masks = {
            name.removeprefix("mask_"): torch.as_tensor(arr)
            for name, arr in data.items()
            if name.startswith("mask_")
        }
        actions = torch.as_tensor(data["actions"])
        old_log_probs = torch.as_tensor(data["log_probs"])
        advantages = torch.as_tensor(data["advantages"])
        returns = torch.as_tensor(data["returns"])

        stats = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "clip_fraction": 0.0, "approx_kl": 0.0}
        batches = 0
        indices = np.arange(n)
        for _ in range(cfg.n_epochs):
            self._shuffle_rng.shuffle(indices)
            for start in range(0, n, cfg.batch_size):
                mb = indices[start : start + cfg.batch_size]
                mb_t = torch.as_tensor(mb)
                dist, values = self.distribution(
                    {k: v[mb_t] for k, v in obs.items()},
                    {k: v[mb_t] for k, v in masks.items()},
                )
                log_probs = dist.log_prob(actions[mb_t])
                entropy = dist.entropy().mean()
                ratio = torch.exp(log_probs - old_log_probs[mb_t])
                adv = advantages[mb_t]
                adv = (adv - adv.mean()) / (adv.std() + 1e-8)
                policy_loss = -clipped_surrogate(ratio, adv, cfg.clip_range).mean()
                value_loss = torch.nn.functional.mse_loss(values.double(), returns[mb_t])
                loss = policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * entropy
                self.optimizer.zero_grad()
                loss.backward()
                nn.utils.clip_grad_norm_(self.net.parameters(), cfg.max_grad_norm)
                self.optimizer.step()

                with torch.no_grad():
                    stats["policy_loss"] += float(policy_loss)
                    stats["value_loss"] += float(value_loss)
                    stats["entropy"] += float(entropy)
                    stats["clip_fraction"] += float(
                        ((ratio - 1.0).abs() > cfg.clip_range).float().mean()
                    )
                    stats["approx_kl"] += float((ratio - 1.0 - ratio.log()).mean())
                batches += 1
        for key in stats:
            stats[key] /= max(batches, 1)
        explained = _explained_variance(data["values"], data["returns"])
        stats["explained_variance"] = explained
        return stats

    # -- persistence ------------------------------------------------------------

    def save(self, path) -> None:
        torch.save(
            {
                "format_version": 1,
                "agent": self.kind,
                "seed": self.seed,
                "config": asdict(self.config),
                "encoder_config": asdict(self.encoder_config),
                "env_info": self.env_info,
                "policy_state": self.net.state_dict(),
                "optimizer_state": self.optimizer.state_dict(),
            },
            path,
        )

    @classmethod
    def load(cls, path) -> "PpoAgent":
        payload = torch.load(path, weights_only=False)
        if payload.get("format_version") != 1:
            raise ValueError(f"unsupported checkpoint format {payload.get('format_version')!r}")
        config = PpoConfig(**{**payload["config"], "policy_hidden": tuple(payload["config"]["policy_hidden"])})
        agent = cls(
            payload["env_info"],
            config,
            kind=payload["agent"],
            encoder_config=EncoderConfig(**payload["encoder_config"]),
            seed=payload["seed"],
        )
        agent.net.load_state_dict(payload["policy_state"])
        agent.optimizer.load_state_dict(payload["optimizer_state"])
        return agent


def _explained_variance(values: np.ndarray, returns: np.ndarray) -> float:
    var = np.var(returns)
    if var == 0.0:
        return 0.0
    return float(1.0 - np.var(returns - values) / var)
