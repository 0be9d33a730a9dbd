"""Deterministic actor-critic baseline over a relaxed continuous action.

The actor emits one tanh-bounded scalar per discrete head; the environment
boundary rescales and rounds each scalar onto its head's index range (see
`ddpg_act`). The critic learns Q-values of the continuous pre-rounding
action. This baseline exists to measure how the continuous relaxation of
an inherently combinatorial decision behaves; it neither masks nor models
head structure.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from .buffers import ReplayBuffer
from .networks import DdpgActor, DdpgCritic, ddpg_act


@dataclass(frozen=True)
class DdpgConfig:
    learning_rate: float = 1e-4
    batch_size: int = 128
    discount: float = 0.98
    tau: float = 0.005
    noise_sigma: float = 0.1
    replay_size: int = 100_000
    warmup_steps: int = 1_000
    hidden: tuple[int, ...] = (256, 256)

    def validate(self) -> None:
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.replay_size < self.batch_size:
            raise ValueError("replay_size must hold at least one batch")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must lie in [0, 1]")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")


class DdpgAgent:
    """DDPG over flat observations with target networks and soft updates."""

    kind = "DDPG"

    def __init__(self, env_info: dict, config: DdpgConfig = DdpgConfig(), seed: int = 0):
        config.validate()
        self.config = config
        self.env_info = env_info
        self.seed = seed
        torch.manual_seed(seed)
        obs_dim = env_info["flat_dim"]
        self.nvec = np.asarray(env_info["action_nvec"], dtype=np.int64)
        n_heads = len(self.nvec)
        self.actor = DdpgActor(obs_dim, n_heads, config.hidden)
        self.critic = DdpgCritic(obs_dim, n_heads, config.hidden)
        self.target_actor = DdpgActor(obs_dim, n_heads, config.hidden)
        self.target_critic = DdpgCritic(obs_dim, n_heads, config.hidden)
        self.target_actor.load_state_dict(self.actor.state_dict())
        self.target_critic.load_state_dict(self.critic.state_dict())
        self.actor_opt = torch.optim.Adam(self.actor.parameters(), lr=config.learning_rate)
        self.critic_opt = torch.optim.Adam(self.critic.parameters(), lr=config.learning_rate)
        self.replay = ReplayBuffer(config.replay_size, obs_dim, n_heads)
        self._noise_rng = np.random.default_rng(seed)
        self._steps_seen = 0

    def act_continuous(self, flat_obs: np.ndarray, explore: bool) -> np.ndarray:
        with torch.no_grad():
            out = self.actor(torch.as_tensor(flat_obs, dtype=torch.float32)).numpy()
        if explore:
            out = out + self._noise_rng.normal(0.0, self.config.noise_sigma, size=out.shape)
        return np.clip(out, -1.0, 1.0)

    def policy(self, deterministic: bool = True):
        def _policy(observation, mask) -> np.ndarray:
            cont = self.act_continuous(observation.flat[None, :], explore=not deterministic)
            return ddpg_act(cont[0], self.nvec)

        return _policy

    def collect(self, vec_env, horizon: int) -> tuple[list[dict], dict[str, float]]:
        """Act, store transitions, and update once per vectorized step."""
        events: list[dict] = []
        diag = {"critic_loss": 0.0, "actor_loss": 0.0}
        updates = 0
        for _ in range(horizon):
            obs = np.stack([o.flat for o in vec_env.observations])
            cont = self.act_continuous(obs, explore=True)
            actions = ddpg_act(cont, self.nvec[None, :])
            rewards, dones, step_events = vec_env.step(actions)
            next_obs = np.stack([o.flat for o in vec_env.observations])
            for e in range(len(vec_env)):
                self.replay.push(obs[e], cont[e], rewards[e], next_obs[e], dones[e])
            self._steps_seen += len(vec_env)
            events.extend(step_events)
            if self._steps_seen >= self.config.warmup_steps and len(self.replay) >= self.config.batch_size:
                step_diag = self.update_once()
                diag["critic_loss"] += step_diag["critic_loss"]
                diag["actor_loss"] += step_diag["actor_loss"]
                updates += 1
        if updates:
            diag = {k: v / updates for k, v in diag.items()}
        return events, diag

    def update_once(self) -> dict[str, float]:
        cfg = self.config
        batch = self.replay.sample(cfg.batch_size, self._noise_rng)
        obs = torch.as_tensor(batch["obs"])
        actions = torch.as_tensor(batch["actions"])
        rewards = torch.as_tensor(batch["rewards"], dtype=torch.float32)
        next_obs = torch.as_tensor(batch["next_obs"])
        not_done = 1.0 - torch.as_tensor(batch["dones"], dtype=torch.float32)

        with torch.no_grad():
            target_q = rewards + cfg.discount * not_done * self.target_critic(
                next_obs, self.target_actor(next_obs)
            )
        critic_loss = torch.nn.functional.mse_loss(self.critic(obs, actions), target_q)
        self.critic_opt.zero_grad()
        critic_loss.backward()
        self.critic_opt.step()

        actor_loss = -self.critic(obs, self.actor(obs)).mean()
        self.actor_opt.zero_grad()
        actor_loss.backward()
        self.actor_opt.step()

        with torch.no_grad():
            for target, online in (
                (self.target_actor, self.actor),
                (self.target_critic, self.critic),
            ):
                for tp, p in zip(target.parameters(), online.parameters()):
                    tp.mul_(1.0 - cfg.tau).add_(cfg.tau * p)
        return {"critic_loss": critic_loss.item(), "actor_loss": actor_loss.item()}

    def save(self, path) -> None:
        torch.save(
            {
                "format_version": 1,
                "agent": self.kind,
                "seed": self.seed,
                "config": asdict(self.config),
                "env_info": self.env_info,
                "actor_state": self.actor.state_dict(),
                "critic_state": self.critic.state_dict(),
            },
            path,
        )

    @classmethod
    def load(cls, path) -> "DdpgAgent":
        payload = torch.load(path, weights_only=False)
        if payload.get("format_version") != 1:
            raise ValueError(f"unsupported checkpoint format {payload.get('format_version')!r}")
        config = DdpgConfig(**{**payload["config"], "hidden": tuple(payload["config"]["hidden"])})
        agent = cls(payload["env_info"], config, seed=payload["seed"])
        agent.actor.load_state_dict(payload["actor_state"])
        agent.critic.load_state_dict(payload["critic_state"])
        agent.target_actor.load_state_dict(payload["actor_state"])
        agent.target_critic.load_state_dict(payload["critic_state"])
        return agent
