"""Learning agents: masked multi-head PPO variants and a DDPG baseline."""

from .ddpg import DdpgAgent, DdpgConfig
from .distributions import MaskedCategorical, MultiHeadCategorical, masked_logits
from .networks import ddpg_act, init_xavier_uniform
from .ppo import PPO_KINDS, PpoAgent, PpoConfig, clipped_surrogate

AGENT_KINDS = (*PPO_KINDS, "DDPG")

__all__ = [
    "AGENT_KINDS",
    "PPO_KINDS",
    "DdpgAgent",
    "DdpgConfig",
    "MaskedCategorical",
    "MultiHeadCategorical",
    "PpoAgent",
    "PpoConfig",
    "clipped_surrogate",
    "ddpg_act",
    "init_xavier_uniform",
    "masked_logits",
]
