"""Policy, value, and DDPG networks plus initialization helpers."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn


def mlp(in_dim: int, hidden: tuple[int, ...], out_dim: int) -> nn.Sequential:
    """ReLU MLP with a linear output layer."""
    sizes = (in_dim, *hidden)
    layers: list[nn.Module] = []
    for a, b in zip(sizes[:-1], sizes[1:]):
        layers += [nn.Linear(a, b), nn.ReLU()]
    layers.append(nn.Linear(sizes[-1], out_dim))
    return nn.Sequential(*layers)


def init_xavier_uniform(module: nn.Module) -> None:
    """Xavier-uniform weights and zero biases on every linear layer."""
    for m in module.modules():
        if isinstance(m, nn.Linear):
            nn.init.xavier_uniform_(m.weight)
            nn.init.zeros_(m.bias)


class IdentityFrontEnd(nn.Module):
    """Flat observations pass straight into the heads."""

    def __init__(self, obs_dim: int):
        super().__init__()
        self.out_dim = obs_dim

    def forward(self, flat: torch.Tensor) -> torch.Tensor:
        return flat


class PolicyValueNet(nn.Module):
    """Shared front end with separate policy and value MLP heads.

    The policy head emits one logits block per head group (splits, vDUs,
    vCUs), each reshaped to (batch, N, choices); the value head emits one
    scalar per sample.
    """

    def __init__(
        self,
        front_end: nn.Module,
        n_rh: int,
        group_sizes: tuple[int, int, int],
        hidden: tuple[int, ...] = (256, 256),
    ):
        super().__init__()
        self.front_end = front_end
        self.n_rh = n_rh
        self.group_sizes = tuple(group_sizes)
        total = n_rh * sum(group_sizes)
        self.policy = mlp(front_end.out_dim, hidden, total)
        self.value = mlp(front_end.out_dim, hidden, 1)
        init_xavier_uniform(self)

    def forward(self, *obs: torch.Tensor) -> tuple[list[torch.Tensor], torch.Tensor]:
        feats = self.front_end(*obs)
        logits = self.policy(feats)
        groups = []
        offset = 0
        for size in self.group_sizes:
            width = self.n_rh * size
            block = logits[..., offset : offset + width]
            groups.append(block.reshape(*block.shape[:-1], self.n_rh, size))
            offset += width
        value = self.value(feats).squeeze(-1)
        return groups, value


class DdpgActor(nn.Module):
    """Deterministic actor emitting one tanh-bounded scalar per action head."""

    def __init__(self, obs_dim: int, n_heads: int, hidden: tuple[int, ...] = (256, 256)):
        super().__init__()
        self.net = mlp(obs_dim, hidden, n_heads)
        init_xavier_uniform(self)

    def forward(self, obs: torch.Tensor) -> torch.Tensor:
        return torch.tanh(self.net(obs))


class DdpgCritic(nn.Module):
    def __init__(self, obs_dim: int, n_heads: int, hidden: tuple[int, ...] = (256, 256)):
        super().__init__()
        self.net = mlp(obs_dim + n_heads, hidden, 1)
        init_xavier_uniform(self)

    def forward(self, obs: torch.Tensor, action: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([obs, action], dim=-1)).squeeze(-1)


def ddpg_act(continuous: np.ndarray, nvec: np.ndarray) -> np.ndarray:
    """Rescale and round tanh outputs in [-1, 1] to discrete head indices.

    Each coordinate maps affinely onto [0, n_k - 1] and rounds half up, so
    -1 hits the first index, +1 the last, and 0 on a four-option head lands
    on index 2 (the third option). Values outside [-1, 1] clamp.
    """
    continuous = np.clip(np.asarray(continuous, dtype=np.float64), -1.0, 1.0)
    scaled = (continuous + 1.0) * (nvec - 1) / 2.0
    return np.floor(scaled + 0.5).astype(np.int64)
