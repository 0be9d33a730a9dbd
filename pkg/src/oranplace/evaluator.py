"""Allocation feasibility, load accounting, cost components, and reward.

An allocation assigns every RH a split level, a vDU host (ES) and a vCU
host (RC). Feasibility splits into two layers:

  connectivity: the links the allocation routes over must exist (splits
  1..3 need RH-ES and ES-RC edges, split 4 needs a direct RH-RC edge).
  `n_fail` counts missing links over all RHs.

  service quality: with connectivity intact, capacity, latency, and
  bandwidth limits apply; violations are summed by magnitude into J_SLA
  rather than rejecting the allocation outright.

The per-slot deployment cost J = J_C + J_R + J_L + J_SLA combines compute
price, reconfiguration penalty, delay-weighted routed load, and the SLA
violation total. The slot reward maps J into (0, 1] for connected
allocations, penalizes missing links in proportion to their count, and
pins the early-termination case at -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .splits import DEFAULT_CATALOG, Catalog, CostParams, SplitId, catalog_arrays
from .substrate import SubstrateGraph
from .traffic import Request


@dataclass
class Allocation:
    """Per-RH decisions: split level (1..4), vDU host order, vCU host order."""

    split: np.ndarray  # (N,) int, SplitId values 1..4
    du: np.ndarray  # (N,) int, ES order
    cu: np.ndarray  # (N,) int, RC order

    def __post_init__(self) -> None:
        self.split = np.asarray(self.split, dtype=np.int64)
        self.du = np.asarray(self.du, dtype=np.int64)
        self.cu = np.asarray(self.cu, dtype=np.int64)
        if not (self.split.shape == self.du.shape == self.cu.shape) or self.split.ndim != 1:
            raise ValueError("split, du, cu must be 1-d arrays of equal length")
        if self.split.min(initial=1) < 1 or self.split.max(initial=4) > 4:
            raise ValueError("split values must lie in 1..4")

    @property
    def n(self) -> int:
        return int(self.split.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Allocation):
            return NotImplemented
        return (
            np.array_equal(self.split, other.split)
            and np.array_equal(self.du, other.du)
            and np.array_equal(self.cu, other.cu)
        )


@dataclass
class NetworkLoad:
    """Aggregate compute and cross-haul load induced by one allocation."""

    es_compute: np.ndarray  # (|D|,) CCs
    rc_compute: np.ndarray  # (|C|,) CCs
    crosshaul: np.ndarray  # (|D|, |C|) Gbps on ES-RC links
    direct: np.ndarray  # (N, |C|) Gbps on direct RH-RC links

    @classmethod
    def zeros(cls, n_rh: int, n_es: int, n_rc: int) -> "NetworkLoad":
        return cls(
            es_compute=np.zeros(n_es),
            rc_compute=np.zeros(n_rc),
            crosshaul=np.zeros((n_es, n_rc)),
            direct=np.zeros((n_rh, n_rc)),
        )


@dataclass
class SlaViolations:
    """Nonnegative violation magnitudes per service-quality constraint."""

    es_capacity: np.ndarray  # (|D|,) CCs over capacity
    rc_capacity: np.ndarray  # (|C|,)
    e2e_latency: np.ndarray  # (N,) ms over the request budget
    crosshaul_latency: np.ndarray  # (N,) ms over the split bound
    crosshaul_bandwidth: np.ndarray  # (|D|, |C|) Gbps over link bandwidth
    direct_bandwidth: np.ndarray  # (N, |C|)

    @property
    def total(self) -> float:
        """J_SLA: plain sum of all violation magnitudes."""
        return float(
            self.es_capacity.sum()
            + self.rc_capacity.sum()
            + self.e2e_latency.sum()
            + self.crosshaul_latency.sum()
            + self.crosshaul_bandwidth.sum()
            + self.direct_bandwidth.sum()
        )


@dataclass
class FeasibilityReport:
    """Connectivity verdict, optionally extended with SLA magnitudes."""

    n_fail: int
    rh_fail_counts: np.ndarray  # (N,) missing links per RH, 0..2
    sla: SlaViolations | None = None

    @property
    def connected(self) -> bool:
        return self.n_fail == 0


@dataclass(frozen=True)
class CostBreakdown:
    compute: float
    reconfig: float
    routing: float
    sla: float

    @property
    def total(self) -> float:
        return self.compute + self.reconfig + self.routing + self.sla


def _request_loads(requests: list[Request]) -> np.ndarray:
    return np.array([q.load_mbps for q in requests])


def _check_alloc_shape(alloc: Allocation, graph: SubstrateGraph) -> None:
    if alloc.n != graph.n_rh:
        raise ValueError(f"allocation covers {alloc.n} RHs, graph has {graph.n_rh}")
    if alloc.du.min(initial=0) < 0 or alloc.du.max(initial=0) >= graph.n_es:
        raise ValueError("vDU host order out of range")
    if alloc.cu.min(initial=0) < 0 or alloc.cu.max(initial=0) >= graph.n_rc:
        raise ValueError("vCU host order out of range")


def check_connectivity(alloc: Allocation, graph: SubstrateGraph) -> FeasibilityReport:
    """Count missing links per RH.

    Splits 1..3 require the RH-ES edge to the chosen vDU host and the ES-RC
    edge between the chosen hosts (0..2 failures per RH). Split 4 requires
    only the direct RH-RC edge to the chosen vCU host (0..1 failures).
    """
    _check_alloc_shape(alloc, graph)
    n = alloc.n
    rh = np.arange(n)
    s4 = alloc.split == int(SplitId.S4)
    fails = np.zeros(n, dtype=np.int64)
    fails[~s4] += (~graph.e_rd[rh[~s4], alloc.du[~s4]]).astype(np.int64)
    fails[~s4] += (~graph.e_dc[alloc.du[~s4], alloc.cu[~s4]]).astype(np.int64)
    fails[s4] += (~graph.e_rc[rh[s4], alloc.cu[s4]]).astype(np.int64)
    return FeasibilityReport(n_fail=int(fails.sum()), rh_fail_counts=fails)


def compute_loads(
    alloc: Allocation,
    requests: list[Request],
    graph: SubstrateGraph,
    catalog: Catalog = DEFAULT_CATALOG,
) -> NetworkLoad:
    """Aggregate compute and cross-haul load per host and link.

    Loads on missing links are undefined, so calling this with a
    disconnected allocation is a usage error.
    """
    report = check_connectivity(alloc, graph)
    if report.n_fail > 0:
        raise ValueError(f"allocation routes over {report.n_fail} missing links; loads are undefined")
    if len(requests) != graph.n_rh:
        raise ValueError(f"need one request per RH, got {len(requests)} for {graph.n_rh} RHs")
    arrays = catalog_arrays(catalog)
    lam = _request_loads(requests)
    s_idx = alloc.split - 1
    s4 = arrays["requires_direct"][s_idx]
    beta = arrays["load_slope"][s_idx] * (lam / 1000.0) + arrays["load_offset_gbps"][s_idx]

    load = NetworkLoad.zeros(graph.n_rh, graph.n_es, graph.n_rc)
    # split 4 collapses the vDU into the radio side: no ES compute, no ES-RC traffic
    np.add.at(load.es_compute, alloc.du[~s4], arrays["du_coeff"][s_idx[~s4]] * lam[~s4])
    np.add.at(load.rc_compute, alloc.cu, arrays["cu_coeff"][s_idx] * lam)
    np.add.at(load.crosshaul, (alloc.du[~s4], alloc.cu[~s4]), beta[~s4])
    rh = np.arange(alloc.n)
    np.add.at(load.direct, (rh[s4], alloc.cu[s4]), beta[s4])
    return load


def check_sla(
    alloc: Allocation,
    requests: list[Request],
    graph: SubstrateGraph,
    load: NetworkLoad,
    catalog: Catalog = DEFAULT_CATALOG,
) -> SlaViolations:
    """Violation magnitudes for capacity, latency, and bandwidth limits.

    Assumes the allocation passed connectivity (see compute_loads). The
    end-to-end latency of splits 1..3 is the RH-ES plus ES-RC delay; split
    4 rides the direct link. The cross-haul latency bound applies to the
    ES-RC segment, which split 4 does not have, so split 4 never violates
    it (its direct links satisfy the bound by construction).
    """
    arrays = catalog_arrays(catalog)
    n = alloc.n
    rh = np.arange(n)
    s_idx = alloc.split - 1
    s4 = arrays["requires_direct"][s_idx]

    latency_budget = np.array([q.latency_ms for q in requests])
    e2e = np.where(
        s4,
        graph.d_rc[rh, alloc.cu],
        graph.d_rd[rh, alloc.du] + graph.d_dc[alloc.du, alloc.cu],
    )
    cross = np.where(s4, 0.0, graph.d_dc[alloc.du, alloc.cu])
    cross_bound = arrays["delay_bound_ms"][s_idx]

    return SlaViolations(
        es_capacity=np.maximum(load.es_compute - graph.cap_es, 0.0),
        rc_capacity=np.maximum(load.rc_compute - graph.cap_rc, 0.0),
        e2e_latency=np.maximum(e2e - latency_budget, 0.0),
        crosshaul_latency=np.maximum(cross - cross_bound, 0.0),
        crosshaul_bandwidth=np.maximum(load.crosshaul - graph.bw_dc, 0.0),
        direct_bandwidth=np.maximum(load.direct - graph.bw_rc, 0.0),
    )


def total_cost(
    prev: Allocation | None,
    alloc: Allocation,
    requests: list[Request],
    graph: SubstrateGraph,
    params: CostParams = CostParams(),
    catalog: Catalog = DEFAULT_CATALOG,
    load: NetworkLoad | None = None,
    sla: SlaViolations | None = None,
) -> CostBreakdown:
    """Per-slot deployment cost of a connected allocation.

    compute: priced demand of every vDU and vCU instance.
    reconfig: one-hot L1 distance between consecutive placements, i.e. 2
      per moved vDU plus 2 per moved vCU; on the first slot (prev is None)
      it is 0. An RH that stays in split 4 has no vDU instance, so its vDU
      term is skipped only when both consecutive splits are 4.
    routing: delay-weighted cross-haul load over ES-RC and direct links.
    sla: violation magnitude total.
    """
    if load is None:
        load = compute_loads(alloc, requests, graph, catalog)
    if sla is None:
        sla = check_sla(alloc, requests, graph, load, catalog)
    arrays = catalog_arrays(catalog)
    lam = _request_loads(requests)
    s_idx = alloc.split - 1
    s4 = arrays["requires_direct"][s_idx]

    j_compute = float(
        params.du_price * np.sum(arrays["du_coeff"][s_idx] * lam)
        + params.cu_price * np.sum(arrays["cu_coeff"][s_idx] * lam)
    )

    if prev is None:
        j_reconfig = 0.0
    else:
        if prev.n != alloc.n:
            raise ValueError("previous allocation covers a different RH count")
        prev_s4 = arrays["requires_direct"][prev.split - 1]
        du_moved = (alloc.du != prev.du) & ~(s4 & prev_s4)
        cu_moved = alloc.cu != prev.cu
        j_reconfig = params.reconfig_weight * 2.0 * float(du_moved.sum() + cu_moved.sum())

    beta = arrays["load_slope"][s_idx] * (lam / 1000.0) + arrays["load_offset_gbps"][s_idx]
    rh = np.arange(alloc.n)
    link_delay = np.where(s4, graph.d_rc[rh, alloc.cu], graph.d_dc[alloc.du, alloc.cu])
    j_routing = params.routing_weight * float(np.sum(link_delay * beta))

    return CostBreakdown(
        compute=j_compute, reconfig=j_reconfig, routing=j_routing, sla=sla.total
    )


def reward(
    report: FeasibilityReport,
    cost: CostBreakdown | None,
    early_terminated: bool,
    n_rh: int,
) -> float:
    """Slot reward in [-1, 1].

    Early termination dominates at -1. A disconnected allocation earns
    -n_fail / (2 n_rh), proportional to how many links are missing out of
    the worst case of two per RH. A connected allocation earns
    1 / (1 + ln(1 + J)), which lies in (0, 1].
    """
    if early_terminated:
        return -1.0
    if report.n_fail > 0:
        return -report.n_fail / (2.0 * n_rh)
    if cost is None:
        raise ValueError("a connected allocation needs its cost to be rewarded")
    return 1.0 / (1.0 + math.log1p(cost.total))
