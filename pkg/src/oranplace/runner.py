"""Training and evaluation orchestration.

A run trains one agent kind on one topology (or a round-robin set) for a
fixed number of environment steps, recording one metrics line per rollout
iteration and per evaluation episode, and checkpointing at every
evaluation point. All randomness descends from the run seed, so a config
plus a seed reproduces its metrics stream exactly (timing fields aside).
"""

from __future__ import annotations

import collections
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .agents import DdpgAgent, PpoAgent
from .config import RunConfig, config_to_yaml
from .environment import ActionMask, Observation, PlacementEnv
from .metrics import MetricsWriter
from .substrate import SubstrateGraph, generate_topology, parse_topology

_SEED_STRIDE = 100_003  # spreads env seeds away from the run seed


@dataclass
class EpisodeStats:
    reward: float
    slots: int
    deploy_cost: float | None
    j_compute: float
    j_reconfig: float
    j_routing: float
    j_sla: float
    invalid_attempts: int
    early_terminated: bool
    success: bool
    topology_id: str


class _EpisodeAccumulator:
    """Collects per-step results of one episode into an EpisodeStats."""

    def __init__(self, topology_id: str):
        self.topology_id = topology_id
        self.reward = 0.0
        self.slots = 0
        self.invalid = 0
        self.early = False
        self.costs = {"compute": 0.0, "reconfig": 0.0, "routing": 0.0, "sla": 0.0}
        self.accepted = 0

    def update(self, reward: float, terminated: bool, info: dict) -> None:
        self.reward += reward
        cost = info.get("cost")
        if cost is None:
            self.invalid += 1
            self.early = self.early or terminated
        else:
            self.accepted += 1
            self.slots = info["slot"]
            for key in self.costs:
                self.costs[key] += getattr(cost, key)

    def finalize(self) -> EpisodeStats:
        total = sum(self.costs.values())
        return EpisodeStats(
            reward=self.reward,
            slots=self.slots,
            deploy_cost=total if self.accepted else None,
            j_compute=self.costs["compute"],
            j_reconfig=self.costs["reconfig"],
            j_routing=self.costs["routing"],
            j_sla=self.costs["sla"],
            invalid_attempts=self.invalid,
            early_terminated=self.early,
            success=self.invalid == 0 and not self.early,
            topology_id=self.topology_id,
        )


class VectorEnvs:
    """Steps a list of environments in lockstep with auto-reset.

    A finished episode is reported as an event and its environment resets
    immediately, so `observations` always holds live states.
    """

    def __init__(self, envs: list[PlacementEnv], reset_seeds: list[int]):
        if len(envs) != len(reset_seeds):
            raise ValueError("need one reset seed per environment")
        self.envs = envs
        self.observations: list[Observation] = []
        self._trackers: list[_EpisodeAccumulator] = []
        for env, seed in zip(envs, reset_seeds):
            self.observations.append(env.reset(seed).observation)
            self._trackers.append(_EpisodeAccumulator(env.topology_id))

    def __len__(self) -> int:
        return len(self.envs)

    @property
    def masks(self) -> list[ActionMask]:
        return [env.mask for env in self.envs]

    def step(self, actions: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[dict]]:
        rewards = np.zeros(len(self.envs))
        dones = np.zeros(len(self.envs), dtype=bool)
        events: list[dict] = []
        for i, env in enumerate(self.envs):
            result = env.step(np.asarray(actions[i]))
            rewards[i] = result.reward
            done = result.terminated or result.truncated
            dones[i] = done
            self._trackers[i].update(result.reward, result.terminated, result.info)
            if done:
                events.append({"episode": self._trackers[i].finalize(), "env": i})
                self.observations[i] = env.reset().observation
                self._trackers[i] = _EpisodeAccumulator(env.topology_id)
            else:
                self.observations[i] = result.observation
        return rewards, dones, events


# -- construction -----------------------------------------------------------


def load_topologies(cfg: RunConfig) -> list[tuple[str, SubstrateGraph]]:
    """The run's topologies as (id, graph) pairs."""
    topo = cfg.topology
    if topo.files:
        out = []
        for path in topo.files:
            graph = parse_topology(Path(path).read_text())
            out.append((Path(path).stem, graph))
        first = out[0][1]
        for name, graph in out[1:]:
            if (graph.n_rh, graph.n_es, graph.n_rc) != (first.n_rh, first.n_es, first.n_rc):
                raise ValueError(
                    f"topology {name} has different node counts; multi-topology runs "
                    "need one size class"
                )
        return out
    if topo.file:
        return [(Path(topo.file).stem, parse_topology(Path(topo.file).read_text()))]
    spec = topo.spec()
    return [(f"gen-{spec.seed}", generate_topology(spec))]


def make_env(cfg: RunConfig, graph: SubstrateGraph, topology_id: str, seed: int | None) -> PlacementEnv:
    return PlacementEnv(
        graph,
        session=cfg.traffic.session(),
        cost_params=cfg.costs.params(),
        catalog=cfg.splits.catalog(),
        slice_profiles=cfg.traffic.profiles(),
        seed=seed,
        topology_id=topology_id,
    )


def make_agent(cfg: RunConfig, env_info: dict, seed: int):
    kind = cfg.agent.kind
    if kind == "DDPG":
        return DdpgAgent(env_info, cfg.agent.ddpg, seed=seed)
    return PpoAgent(
        env_info,
        cfg.agent.ppo_config(),
        kind=kind,
        encoder_config=cfg.agent.encoder,
        seed=seed,
    )


def _check_graph_agent_envs(cfg: RunConfig, topologies: list) -> None:
    if cfg.agent.kind == "GPPO" and len(topologies) > 1:
        raise ValueError(
            "the graph front end trains on a single topology; "
            "use MPPO for multi-topology runs"
        )


# -- evaluation ---------------------------------------------------------------


def run_episode(env: PlacementEnv, policy, seed: int | None = None) -> EpisodeStats:
    """One greedy episode; the streak limit bounds retries, so this halts."""
    result = env.reset(seed)
    tracker = _EpisodeAccumulator(env.topology_id)
    while True:
        action = policy(result.observation, env.mask)
        result = env.step(np.asarray(action))
        tracker.update(result.reward, result.terminated, result.info)
        if result.terminated or result.truncated:
            return tracker.finalize()


def evaluate_policy(
    envs: list[PlacementEnv],
    policy,
    n_episodes: int,
    base_seed: int,
) -> tuple[list[EpisodeStats], dict]:
    """`n_episodes` greedy episodes per environment plus a summary.

    Reward aggregates over every episode; deployment cost aggregates over
    successful episodes only and is omitted when there are none.
    """
    episodes: list[EpisodeStats] = []
    for env in envs:
        for k in range(n_episodes):
            episodes.append(run_episode(env, policy, seed=base_seed + k))
    rewards = np.array([e.reward for e in episodes])
    summary = {
        "episodes": len(episodes),
        "reward_mean": float(rewards.mean()),
        "reward_std": float(rewards.std()),
        "success_rate": float(np.mean([e.success for e in episodes])),
    }
    costs = np.array([e.deploy_cost for e in episodes if e.success])
    if costs.size:
        summary["cost_mean"] = float(costs.mean())
        summary["cost_std"] = float(costs.std())
    return episodes, summary


# -- training -------------------------------------------------------------------


def train_run(cfg: RunConfig, seed: int, run_dir: Path) -> dict:
    """Train one seed, writing metrics, checkpoints, and a final summary."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "checkpoints").mkdir(exist_ok=True)
    torch.manual_seed(seed)

    topologies = load_topologies(cfg)
    _check_graph_agent_envs(cfg, topologies)
    n_envs = cfg.agent.n_envs
    envs = []
    for i in range(n_envs):
        name, graph = topologies[i % len(topologies)]
        envs.append(make_env(cfg, graph, name, seed=None))
    vec = VectorEnvs(envs, [seed * _SEED_STRIDE + i for i in range(n_envs)])
    agent = make_agent(cfg, envs[0].describe(), seed)

    eval_envs = [make_env(cfg, graph, name, seed=None) for name, graph in topologies]
    eval_base = seed * _SEED_STRIDE + 50_000

    horizon = cfg.agent.rollout_horizon
    total = cfg.run.total_timesteps
    window: collections.deque = collections.deque(maxlen=100)
    steps = 0
    iteration = 0
    next_eval = cfg.run.eval_interval
    last_summary: dict = {}

    def run_eval(writer: MetricsWriter, at_step: int) -> dict:
        episodes, summary = evaluate_policy(
            eval_envs, agent.policy(deterministic=True), cfg.run.eval_episodes, eval_base
        )
        for k, ep in enumerate(episodes):
            writer.write(
                {
                    "record": "eval_episode",
                    "timestep": at_step,
                    "episode": k,
                    "seed": seed,
                    "topology": ep.topology_id,
                    "reward": ep.reward,
                    "deploy_cost": ep.deploy_cost,
                    "j_compute": ep.j_compute,
                    "j_reconfig": ep.j_reconfig,
                    "j_routing": ep.j_routing,
                    "j_sla": ep.j_sla,
                    "slots": ep.slots,
                    "invalid_attempts": ep.invalid_attempts,
                    "success": ep.success,
                }
            )
        writer.write({"record": "eval_summary", "timestep": at_step, "seed": seed, **summary})
        agent.save(run_dir / "checkpoints" / f"step_{at_step}.pt")
        return summary

    with MetricsWriter(run_dir / "metrics.jsonl") as writer:
        while steps < total:
            if isinstance(agent, DdpgAgent):
                events, diagnostics = agent.collect(vec, horizon)
            else:
                buffer, events = agent.collect(vec, horizon)
                diagnostics = agent.update(buffer)
            steps += horizon * n_envs
            iteration += 1
            for event in events:
                window.append(event["episode"])
            record = {
                "record": "rollout",
                "iteration": iteration,
                "timestep": steps,
                "seed": seed,
                "episodes_done": len(window),
            }
            if window:
                record["ep_reward_mean"] = float(np.mean([e.reward for e in window]))
                record["success_rate"] = float(np.mean([e.success for e in window]))
                costs = [e.deploy_cost for e in window if e.deploy_cost is not None]
                if costs:
                    record["ep_cost_mean"] = float(np.mean(costs))
            record.update({k: float(v) for k, v in diagnostics.items()})
            writer.write(record)
            if steps >= next_eval and steps < total:
                run_eval(writer, steps)
                next_eval += cfg.run.eval_interval
        last_summary = run_eval(writer, steps)
        agent.save(run_dir / "checkpoints" / "final.pt")
    return last_summary


def train(cfg: RunConfig, out_dir: str | Path) -> dict[int, dict]:
    """Train every configured seed under `out_dir`, one subdirectory each."""
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.yaml").write_text(config_to_yaml(cfg))
    summaries = {}
    for seed in cfg.run.seeds:
        summaries[seed] = train_run(cfg, seed, out_dir / f"seed-{seed}")
    return summaries
