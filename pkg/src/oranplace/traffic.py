"""Slice requests and per-slot session dynamics.

Each RH carries exactly one active request at a time. At every accepted
time slot each RH independently resamples its request with probability
`release_ratio` (a released session is immediately replaced by a fresh
arrival), otherwise the demand persists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class SliceType(str, Enum):
    EMBB = "eMBB"
    MMTC = "mMTC"
    URLLC = "uRLLC"


@dataclass(frozen=True)
class SliceProfile:
    """Closed uniform ranges for a slice's demanded load and latency budget."""

    load_mbps: tuple[float, float]
    latency_ms: tuple[float, float]

    def validate(self) -> None:
        for name, (lo, hi) in (("load_mbps", self.load_mbps), ("latency_ms", self.latency_ms)):
            if lo > hi or lo < 0.0:
                raise ValueError(f"slice profile {name} must be 0 <= lo <= hi, got ({lo}, {hi})")


DEFAULT_SLICE_PROFILES: dict[SliceType, SliceProfile] = {
    SliceType.EMBB: SliceProfile((250.0, 300.0), (15.0, 20.0)),
    SliceType.MMTC: SliceProfile((150.0, 200.0), (180.0, 200.0)),
    SliceType.URLLC: SliceProfile((20.0, 40.0), (2.0, 4.0)),
}

_UNIFORM_MIX = {s: 1.0 / 3.0 for s in SliceType}


@dataclass(frozen=True)
class Request:
    """One active slice session anchored at RH `rh` (within-kind order)."""

    rh: int
    slice: SliceType
    load_mbps: float
    latency_ms: float


@dataclass(frozen=True)
class SessionConfig:
    release_ratio: float = 0.5
    episode_length: int = 288
    slice_mix: dict[SliceType, float] = field(default_factory=lambda: dict(_UNIFORM_MIX))

    def validate(self) -> None:
        if not 0.0 <= self.release_ratio <= 1.0:
            raise ValueError(f"release_ratio must lie in [0, 1], got {self.release_ratio}")
        if self.episode_length < 1:
            raise ValueError(f"episode_length must be positive, got {self.episode_length}")
        if set(self.slice_mix) != set(SliceType):
            raise ValueError("slice_mix must assign a weight to every slice type")
        total = sum(self.slice_mix.values())
        if any(w < 0.0 for w in self.slice_mix.values()) or abs(total - 1.0) > 1e-9:
            raise ValueError(f"slice_mix weights must be nonnegative and sum to 1, got {total}")


def sample_request(
    rh: int,
    slice_type: SliceType,
    rng: np.random.Generator,
    profiles: dict[SliceType, SliceProfile] = DEFAULT_SLICE_PROFILES,
) -> Request:
    """Draw load and latency for one session uniformly from the slice's ranges."""
    profile = profiles[slice_type]
    load = float(rng.uniform(*profile.load_mbps))
    latency = float(rng.uniform(*profile.latency_ms))
    return Request(rh, slice_type, load, latency)


def sample_slice(cfg: SessionConfig, rng: np.random.Generator) -> SliceType:
    slices = list(SliceType)
    weights = np.array([cfg.slice_mix[s] for s in slices])
    return slices[int(rng.choice(len(slices), p=weights / weights.sum()))]


def initial_requests(
    n_rh: int,
    cfg: SessionConfig,
    rng: np.random.Generator,
    profiles: dict[SliceType, SliceProfile] = DEFAULT_SLICE_PROFILES,
) -> list[Request]:
    """Fresh request for every RH, slice type drawn from the configured mix."""
    cfg.validate()
    return [sample_request(r, sample_slice(cfg, rng), rng, profiles) for r in range(n_rh)]


def advance_sessions(
    current: list[Request],
    cfg: SessionConfig,
    rng: np.random.Generator,
    profiles: dict[SliceType, SliceProfile] = DEFAULT_SLICE_PROFILES,
) -> list[Request]:
    """Advance one slot: each RH resamples with probability `release_ratio`.

    Expects exactly one request per RH, ordered by RH index; the result
    preserves that invariant. Retained sessions keep their exact demand.
    """
    cfg.validate()
    for i, req in enumerate(current):
        if req.rh != i:
            raise ValueError(f"expected one request per RH in order, got rh={req.rh} at position {i}")
    out: list[Request] = []
    for req in current:
        if rng.random() < cfg.release_ratio:
            out.append(sample_request(req.rh, sample_slice(cfg, rng), rng, profiles))
        else:
            out.append(req)
    return out
