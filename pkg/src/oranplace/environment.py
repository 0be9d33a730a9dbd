"""Sequential placement decision process over a substrate graph.

One episode covers a fixed number of time slots. Every step the agent
proposes a full allocation (split level, vDU host, and vCU host for each
RH) as a multi-discrete action. A connected allocation is accepted: costs
accrue, sessions advance, and the slot counter moves. A disconnected
allocation is a retry: the slot does not advance, state is unchanged, and
a streak counter grows; five consecutive disconnected proposals terminate
the episode early at reward -1.

The static action mask prunes decisions that topology alone already rules
out: vDU hosts not adjacent to the RH, vCU hosts not reachable through any
shared ES, and the fully centralized split for RHs without a direct RC
link. The mask is necessary but not sufficient: a masked-allowed pair of
hosts may still miss its ES-RC link.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import encoder as _encoder
from .evaluator import (
    Allocation,
    CostBreakdown,
    FeasibilityReport,
    NetworkLoad,
    check_connectivity,
    check_sla,
    compute_loads,
    reward,
    total_cost,
)
from .splits import DEFAULT_CATALOG, Catalog, CostParams
from .substrate import SubstrateGraph
from .traffic import (
    DEFAULT_SLICE_PROFILES,
    Request,
    SessionConfig,
    SliceProfile,
    SliceType,
    advance_sessions,
    initial_requests,
)

MAX_INVALID_STREAK = 5


@dataclass
class ActionMask:
    """Per-head boolean masks: True marks an allowed action index."""

    split: np.ndarray  # (N, 4)
    du: np.ndarray  # (N, |D|)
    cu: np.ndarray  # (N, |C|)

    def heads(self) -> list[np.ndarray]:
        """Flatten to the action-vector head order: splits, vDUs, vCUs."""
        return [*self.split, *self.du, *self.cu]


def compute_mask(graph: SubstrateGraph, catalog: Catalog = DEFAULT_CATALOG) -> ActionMask:
    """Static topology-derived mask.

    A vDU host needs an RH-ES link; a vCU host needs some ES adjacent to
    the RH that links to it; a split that rides a direct RH-RC link needs
    one to exist for the RH.
    """
    n = graph.n_rh
    split = np.ones((n, len(catalog)), dtype=bool)
    for spec in catalog:
        if spec.requires_direct:
            split[:, spec.id.index] = graph.e_rc.any(axis=1)
    du = graph.e_rd.copy()
    cu = (graph.e_rd[:, :, None] & graph.e_dc[None, :, :]).any(axis=1)
    return ActionMask(split=split, du=du, cu=cu)


@dataclass
class Observation:
    """Flat vector plus attributed-graph forms of the same state."""

    flat: np.ndarray
    node_features: np.ndarray
    edge_index: np.ndarray
    edge_features: np.ndarray


@dataclass
class StepResult:
    observation: Observation
    reward: float
    terminated: bool
    truncated: bool
    info: dict[str, Any]


@dataclass
class EnvState:
    requests: list[Request]
    prev_alloc: Allocation | None
    load: NetworkLoad
    t: int
    invalid_streak: int


class PlacementEnv:
    """Episodic placement environment over one substrate graph.

    Flat observation layout (all values divided by the normalization
    constants in `norms`; an absent link pair carries bandwidth 0):

      [0, N)              demanded load per RH
      [N, 2N)             latency budget per RH
      [2N, 2N+D)          remaining ES capacity
      [2N+D, 2N+D+C)      remaining RC capacity
      then three row-major blocks of (bandwidth, delay) pairs over all
      RHxES, ESxRC, and RHxRC host pairs; ES-RC and RH-RC bandwidths are
      remaining after the last accepted allocation.

    Total length 2N + D + C + 2(ND + DC + NC), a function of node counts
    only, so observations are exchangeable across same-sized topologies.
    """

    def __init__(
        self,
        graph: SubstrateGraph,
        session: SessionConfig | None = None,
        cost_params: CostParams | None = None,
        catalog: Catalog = DEFAULT_CATALOG,
        slice_profiles: dict[SliceType, SliceProfile] | None = None,
        seed: int | None = 0,
        topology_id: str = "topo",
    ):
        self.graph = graph
        self.session = session or SessionConfig()
        self.session.validate()
        self.cost_params = cost_params or CostParams()
        self.cost_params.validate()
        self.catalog = catalog
        self.profiles = dict(slice_profiles or DEFAULT_SLICE_PROFILES)
        for profile in self.profiles.values():
            profile.validate()
        self.topology_id = topology_id
        self.norms = _encoder.ObsNorms.for_graph(graph, self.profiles)
        self.mask = compute_mask(graph, catalog)
        for head, name in zip(self.mask.heads(), self._head_names()):
            if not head.any():
                raise ValueError(f"substrate leaves no allowed action for head {name}")
        self._rng = np.random.default_rng(seed)
        self.state: EnvState | None = None
        self._done = True

    # -- descriptors -------------------------------------------------------

    def _head_names(self) -> list[str]:
        n = self.graph.n_rh
        return (
            [f"split[{r}]" for r in range(n)]
            + [f"du[{r}]" for r in range(n)]
            + [f"cu[{r}]" for r in range(n)]
        )

    @property
    def action_nvec(self) -> np.ndarray:
        g = self.graph
        return np.array(
            [len(self.catalog)] * g.n_rh + [g.n_es] * g.n_rh + [g.n_rc] * g.n_rh,
            dtype=np.int64,
        )

    @property
    def flat_obs_dim(self) -> int:
        n, d, c = self.graph.n_rh, self.graph.n_es, self.graph.n_rc
        return 2 * n + d + c + 2 * (n * d + d * c + n * c)

    def describe(self) -> dict[str, Any]:
        """Static space descriptors an agent needs to size its networks."""
        g = self.graph
        return {
            "n_rh": g.n_rh,
            "n_es": g.n_es,
            "n_rc": g.n_rc,
            "flat_dim": self.flat_obs_dim,
            "n_nodes": g.n_nodes,
            "n_edges": 2 * len(g.links),
            "node_feature_dim": _encoder.NODE_FEATURE_DIM,
            "edge_feature_dim": _encoder.EDGE_FEATURE_DIM,
            "edge_index": _encoder.build_edge_index(g),
            "action_nvec": self.action_nvec,
            "topology_id": self.topology_id,
        }

    # -- lifecycle ----------------------------------------------------------

    def reset(self, seed: int | None = None) -> StepResult:
        """Start a fresh episode; reseeding makes the episode deterministic."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        g = self.graph
        self.state = EnvState(
            requests=initial_requests(g.n_rh, self.session, self._rng, self.profiles),
            prev_alloc=None,
            load=NetworkLoad.zeros(g.n_rh, g.n_es, g.n_rc),
            t=0,
            invalid_streak=0,
        )
        self._done = False
        return StepResult(self.observe(), 0.0, False, False, {"mask": self.mask})

    def _decode(self, action: np.ndarray) -> Allocation:
        action = np.asarray(action)
        nvec = self.action_nvec
        if action.shape != nvec.shape:
            raise ValueError(f"action must have shape {nvec.shape}, got {action.shape}")
        if not np.issubdtype(action.dtype, np.integer):
            raise ValueError(f"action must be integer-valued, got dtype {action.dtype}")
        if (action < 0).any() or (action >= nvec).any():
            bad = int(np.argmax((action < 0) | (action >= nvec)))
            raise ValueError(
                f"action head {self._head_names()[bad]} got index {action[bad]}, "
                f"valid range is [0, {nvec[bad]})"
            )
        n = self.graph.n_rh
        return Allocation(split=action[:n] + 1, du=action[n : 2 * n], cu=action[2 * n :])

    def step(self, action: np.ndarray) -> StepResult:
        if self.state is None or self._done:
            raise RuntimeError("episode is over or not started; call reset() first")
        alloc = self._decode(action)
        st = self.state
        report = check_connectivity(alloc, self.graph)

        if report.n_fail > 0:
            # retry semantics: the slot does not advance and state is untouched
            st.invalid_streak += 1
            early = st.invalid_streak >= MAX_INVALID_STREAK
            r = reward(report, None, early, self.graph.n_rh)
            self._done = early
            info = self._info(report, None, None)
            return StepResult(self.observe(), r, early, False, info)

        load = compute_loads(alloc, st.requests, self.graph, self.catalog)
        sla = check_sla(alloc, st.requests, self.graph, load, self.catalog)
        cost = total_cost(
            st.prev_alloc,
            alloc,
            st.requests,
            self.graph,
            self.cost_params,
            self.catalog,
            load=load,
            sla=sla,
        )
        report.sla = sla
        r = reward(report, cost, False, self.graph.n_rh)

        st.prev_alloc = alloc
        st.load = load
        st.invalid_streak = 0
        st.t += 1
        truncated = st.t >= self.session.episode_length
        if not truncated:
            st.requests = advance_sessions(st.requests, self.session, self._rng, self.profiles)
        self._done = truncated
        info = self._info(report, cost, alloc)
        return StepResult(self.observe(), r, False, truncated, info)

    def _info(
        self,
        report: FeasibilityReport,
        cost: CostBreakdown | None,
        alloc: Allocation | None,
    ) -> dict[str, Any]:
        return {
            "report": report,
            "cost": cost,
            "allocation": alloc,
            "mask": self.mask,
            "slot": self.state.t,
            "invalid_streak": self.state.invalid_streak,
        }

    # -- observations -------------------------------------------------------

    def observe(self) -> Observation:
        if self.state is None:
            raise RuntimeError("call reset() before observing")
        st = self.state
        g = self.graph
        norms = self.norms
        lam = np.array([q.load_mbps for q in st.requests]) / norms.load_mbps
        lat = np.array([q.latency_ms for q in st.requests]) / norms.delay_ms
        es_rem = (g.cap_es - st.load.es_compute) / norms.capacity_cc
        rc_rem = (g.cap_rc - st.load.rc_compute) / norms.capacity_cc
        rd = np.stack([g.bw_rd / norms.bandwidth_gbps, g.d_rd / norms.delay_ms], axis=-1)
        dc = np.stack(
            [(g.bw_dc - st.load.crosshaul) * g.e_dc / norms.bandwidth_gbps, g.d_dc / norms.delay_ms],
            axis=-1,
        )
        rc = np.stack(
            [(g.bw_rc - st.load.direct) * g.e_rc / norms.bandwidth_gbps, g.d_rc / norms.delay_ms],
            axis=-1,
        )
        flat = np.concatenate(
            [lam, lat, es_rem, rc_rem, rd.ravel(), dc.ravel(), rc.ravel()]
        ).astype(np.float32)
        node_feat, edge_index, edge_feat = _encoder.build_graph_obs(
            g, st.requests, st.load, norms
        )
        return Observation(flat, node_feat, edge_index, edge_feat)
