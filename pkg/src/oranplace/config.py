"""Run configuration: schema, defaults, YAML round trip, validation.

The YAML document mirrors the dataclass tree section by section. Loading
is strict: unknown keys raise with their full path so typos surface
immediately. Desk-scale defaults keep a full training run in minutes on a
laptop; every physical and algorithmic constant can be overridden.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .agents import AGENT_KINDS, DdpgConfig, PpoConfig
from .encoder import EncoderConfig, ObsNorms
from .splits import Catalog, CostParams, make_catalog
from .substrate import TopologySpec
from .traffic import SessionConfig, SliceProfile, SliceType


class ConfigError(ValueError):
    """Raised for schema violations in a config document."""


@dataclass
class TopologyConfig:
    n_rh: int = 4
    n_es: int = 2
    n_rc: int = 1
    seed: int = 7
    split4_link_prob: float = 0.1
    rh_es_extra_prob: float = 0.3
    es_rc_extra_prob: float = 0.5
    bandwidth_range_gbps: tuple[float, float] = (10.0, 40.0)
    delay_range_ms: tuple[float, float] = (0.0, 3.6)
    direct_bandwidth_gbps: float = 160.0
    direct_delay_range_ms: tuple[float, float] = (0.1, 0.25)
    es_capacity_cc: float = 20.0
    rc_capacity_cc: float = 100.0
    file: str | None = None
    files: tuple[str, ...] = ()

    def spec(self) -> TopologySpec:
        return TopologySpec(
            n_rh=self.n_rh,
            n_es=self.n_es,
            n_rc=self.n_rc,
            seed=self.seed,
            split4_link_prob=self.split4_link_prob,
            rh_es_extra_prob=self.rh_es_extra_prob,
            es_rc_extra_prob=self.es_rc_extra_prob,
            bandwidth_range_gbps=self.bandwidth_range_gbps,
            delay_range_ms=self.delay_range_ms,
            direct_bandwidth_gbps=self.direct_bandwidth_gbps,
            direct_delay_range_ms=self.direct_delay_range_ms,
            es_capacity_cc=self.es_capacity_cc,
            rc_capacity_cc=self.rc_capacity_cc,
        )


@dataclass
class SplitsConfig:
    load_slopes: tuple[float, float, float, float] = (1.0, 1.0, 1.02, 0.0)
    load_offsets_gbps: tuple[float, float, float, float] = (0.0, 0.0, 0.5, 157.3)
    delay_bounds_ms: tuple[float, float, float, float] = (10.0, 1.0, 0.25, 0.25)
    du_coeffs: tuple[float, float, float, float] = (0.05, 0.04, 0.00325, 0.0)
    cu_coeffs: tuple[float, float, float, float] = (0.0, 0.001, 0.00175, 0.05)

    def catalog(self) -> Catalog:
        return make_catalog(
            load_slopes=self.load_slopes,
            load_offsets_gbps=self.load_offsets_gbps,
            delay_bounds_ms=self.delay_bounds_ms,
            du_coeffs=self.du_coeffs,
            cu_coeffs=self.cu_coeffs,
        )


@dataclass
class CostsConfig:
    du_price: float = 2.0
    cu_price: float = 1.0
    reconfig_weight: float = 1.0
    routing_weight: float = 1.0

    def params(self) -> CostParams:
        return CostParams(
            du_price=self.du_price,
            cu_price=self.cu_price,
            reconfig_weight=self.reconfig_weight,
            routing_weight=self.routing_weight,
        )


@dataclass
class TrafficConfig:
    release_ratio: float = 0.5
    episode_length: int = 288
    slice_mix: dict[str, float] = field(
        default_factory=lambda: {s.value: 1.0 / 3.0 for s in SliceType}
    )
    slices: dict[str, dict[str, tuple[float, float]]] = field(
        default_factory=lambda: {
            "eMBB": {"load_mbps": (250.0, 300.0), "latency_ms": (15.0, 20.0)},
            "mMTC": {"load_mbps": (150.0, 200.0), "latency_ms": (180.0, 200.0)},
            "uRLLC": {"load_mbps": (20.0, 40.0), "latency_ms": (2.0, 4.0)},
        }
    )

    def session(self) -> SessionConfig:
        try:
            mix = {SliceType(name): w for name, w in self.slice_mix.items()}
        except ValueError as exc:
            raise ConfigError(f"traffic.slice_mix: {exc}") from exc
        return SessionConfig(
            release_ratio=self.release_ratio,
            episode_length=self.episode_length,
            slice_mix=mix,
        )

    def profiles(self) -> dict[SliceType, SliceProfile]:
        out: dict[SliceType, SliceProfile] = {}
        for name, ranges in self.slices.items():
            try:
                slice_type = SliceType(name)
            except ValueError as exc:
                raise ConfigError(f"traffic.slices: unknown slice {name!r}") from exc
            extra = set(ranges) - {"load_mbps", "latency_ms"}
            if extra:
                raise ConfigError(f"traffic.slices.{name}: unknown keys {sorted(extra)}")
            out[slice_type] = SliceProfile(
                load_mbps=tuple(ranges["load_mbps"]),
                latency_ms=tuple(ranges["latency_ms"]),
            )
        if set(out) != set(SliceType):
            raise ConfigError("traffic.slices must define all three slice types")
        return out


@dataclass
class AgentSection:
    kind: str = "MPPO"
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
    n_envs: int = 8
    policy_hidden: tuple[int, ...] = (256, 256)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    ddpg: DdpgConfig = field(default_factory=DdpgConfig)

    def ppo_config(self) -> PpoConfig:
        return PpoConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            discount=self.discount,
            gae_lambda=self.gae_lambda,
            clip_range=self.clip_range,
            entropy_coef=self.entropy_coef,
            value_coef=self.value_coef,
            max_grad_norm=self.max_grad_norm,
            n_epochs=self.n_epochs,
            rollout_horizon=self.rollout_horizon,
            n_envs=self.n_envs,
            policy_hidden=self.policy_hidden,
        )


@dataclass
class RunSection:
    seeds: tuple[int, ...] = (1,)
    total_timesteps: int = 100_000
    eval_episodes: int = 10
    eval_interval: int = 50_000
    out_dir: str | None = None


@dataclass
class RunConfig:
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    splits: SplitsConfig = field(default_factory=SplitsConfig)
    costs: CostsConfig = field(default_factory=CostsConfig)
    agent: AgentSection = field(default_factory=AgentSection)
    run: RunSection = field(default_factory=RunSection)

    def validate(self) -> None:
        if self.agent.kind not in AGENT_KINDS:
            raise ConfigError(
                f"agent.kind {self.agent.kind!r} is not one of {', '.join(AGENT_KINDS)}"
            )
        if not self.run.seeds:
            raise ConfigError("run.seeds must list at least one seed")
        if self.run.total_timesteps < 1:
            raise ConfigError("run.total_timesteps must be positive")
        if self.run.eval_episodes < 1 or self.run.eval_interval < 1:
            raise ConfigError("run.eval_episodes and run.eval_interval must be positive")
        if self.topology.file and self.topology.files:
            raise ConfigError("topology.file and topology.files are mutually exclusive")
        try:
            self.topology.spec().validate()
            self.agent.ppo_config().validate()
            self.agent.encoder.validate()
            self.agent.ddpg.validate()
            self.costs.params().validate()
            self.traffic.session().validate()
            for profile in self.traffic.profiles().values():
                profile.validate()
            self.splits.catalog()
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def observation_norms(self) -> ObsNorms:
        """Normalization constants the environment derives from this config."""
        topo = self.topology
        load = max(hi for ranges in self.traffic.slices.values() for hi in [ranges["load_mbps"][1]])
        return ObsNorms(
            load_mbps=max(load, 1.0),
            delay_ms=max(topo.delay_range_ms[1], topo.direct_delay_range_ms[1]),
            capacity_cc=max(topo.es_capacity_cc, topo.rc_capacity_cc, 1.0),
            bandwidth_gbps=max(topo.bandwidth_range_gbps[1], topo.direct_bandwidth_gbps),
        )


# -- dict / YAML round trip -------------------------------------------------

_TUPLE_FIELDS = {
    "bandwidth_range_gbps",
    "delay_range_ms",
    "direct_delay_range_ms",
    "load_slopes",
    "load_offsets_gbps",
    "delay_bounds_ms",
    "du_coeffs",
    "cu_coeffs",
    "policy_hidden",
    "hidden",
    "seeds",
    "files",
    "load_mbps",
    "latency_ms",
}


def _to_plain(value):
    if dataclasses.is_dataclass(value):
        return {f.name: _to_plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, tuple):
        return [_to_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _to_plain(v) for k, v in value.items()}
    return value


def config_to_dict(cfg: RunConfig) -> dict:
    return _to_plain(cfg)


def _fill_dataclass(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        sub_path = f"{path}.{name}" if path else name
        f = known[name]
        if dataclasses.is_dataclass(f.type) or name in ("encoder", "ddpg"):
            sub_cls = {"encoder": EncoderConfig, "ddpg": DdpgConfig}[name]
            kwargs[name] = _fill_dataclass(sub_cls, value, sub_path)
        elif name == "slices":
            kwargs[name] = {
                slice_name: {
                    k: tuple(v) if isinstance(v, (list, tuple)) else v for k, v in ranges.items()
                }
                for slice_name, ranges in value.items()
            }
        elif name in _TUPLE_FIELDS and isinstance(value, (list, tuple)):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path or cls.__name__}: {exc}") from exc


_SECTIONS = {
    "topology": TopologyConfig,
    "traffic": TrafficConfig,
    "splits": SplitsConfig,
    "costs": CostsConfig,
    "agent": AgentSection,
    "run": RunSection,
}


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown top-level sections {sorted(unknown)}")
    sections = {
        name: _fill_dataclass(cls, data.get(name, {}), name) for name, cls in _SECTIONS.items()
    }
    cfg = RunConfig(**sections)
    cfg.validate()
    return cfg


def config_to_yaml(cfg: RunConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def load_config(path: str | Path | None = None) -> RunConfig:
    """Default config, optionally overlaid by a YAML file (full sections or partial)."""
    if path is None:
        cfg = RunConfig()
        cfg.validate()
        return cfg
    text = Path(path).read_text()
    data = yaml.safe_load(text)
    if data is None:
        data = {}
    return config_from_dict(data)


def config_show_text(cfg: RunConfig) -> str:
    """Full config plus the derived observation-normalization constants."""
    doc = config_to_dict(cfg)
    norms = cfg.observation_norms()
    doc["observation"] = {
        "norm_load_mbps": norms.load_mbps,
        "norm_delay_ms": norms.delay_ms,
        "norm_capacity_cc": norms.capacity_cc,
        "norm_bandwidth_gbps": norms.bandwidth_gbps,
        "flat_length": "2N + D + C + 2(ND + DC + NC)",
    }
    return yaml.safe_dump(doc, sort_keys=False)
