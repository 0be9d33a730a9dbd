"""Masked categorical action distributions.

Masked entries are excluded by filling their logits with the most negative
representable value before the softmax, which drives their probabilities
to exactly zero and keeps their gradients exactly zero (torch.where routes
no gradient to the replaced branch). Entropy therefore sums over allowed
entries only. A head whose mask allows nothing is a configuration error.
"""

from __future__ import annotations

import torch
from torch.distributions import Categorical


def masked_logits(logits: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    if mask.shape != logits.shape:
        raise ValueError(f"mask shape {tuple(mask.shape)} != logits shape {tuple(logits.shape)}")
    if not mask.any(dim=-1).all():
        raise ValueError("action mask leaves a head with no allowed action")
    return torch.where(mask, logits, torch.finfo(logits.dtype).min)


class MaskedCategorical:
    """Categorical over the last dimension with hard-masked support."""

    def __init__(self, logits: torch.Tensor, mask: torch.Tensor | None = None):
        if mask is not None:
            logits = masked_logits(logits, mask)
        self._dist = Categorical(logits=logits)

    @property
    def probs(self) -> torch.Tensor:
        return self._dist.probs

    def sample(self) -> torch.Tensor:
        return self._dist.sample()

    def log_prob(self, actions: torch.Tensor) -> torch.Tensor:
        return self._dist.log_prob(actions)

    def entropy(self) -> torch.Tensor:
        return self._dist.entropy()

    def mode(self) -> torch.Tensor:
        return self._dist.probs.argmax(dim=-1)


class MultiHeadCategorical:
    """Independent categorical heads acting as one joint distribution.

    Heads are grouped by decision kind: split logits (B, N, 4), vDU logits
    (B, N, D), vCU logits (B, N, C). Samples and modes concatenate to the
    action-vector layout (all splits, all vDUs, all vCUs); joint log
    probability and entropy sum over every head.
    """

    def __init__(
        self,
        head_logits: list[torch.Tensor],
        head_masks: list[torch.Tensor] | None = None,
    ):
        if head_masks is None:
            head_masks = [None] * len(head_logits)
        if len(head_masks) != len(head_logits):
            raise ValueError("need one mask group per logits group")
        self.groups = [
            MaskedCategorical(logits, mask) for logits, mask in zip(head_logits, head_masks)
        ]
        self._widths = [logits.shape[-2] for logits in head_logits]

    def sample(self) -> torch.Tensor:
        return torch.cat([g.sample() for g in self.groups], dim=-1)

    def mode(self) -> torch.Tensor:
        return torch.cat([g.mode() for g in self.groups], dim=-1)

    def log_prob(self, actions: torch.Tensor) -> torch.Tensor:
        total = None
        offset = 0
        for group, width in zip(self.groups, self._widths):
            part = group.log_prob(actions[..., offset : offset + width]).sum(dim=-1)
            total = part if total is None else total + part
            offset += width
        return total

    def entropy(self) -> torch.Tensor:
        return sum(g.entropy().sum(dim=-1) for g in self.groups)
