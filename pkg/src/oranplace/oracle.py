"""Exhaustive exact solver for tiny instances.

Enumerates every (split, vDU, vCU) assignment over all RHs, keeps the
strictly feasible ones (every routed link present, zero violation of
capacity, latency, and bandwidth limits), and returns the cheapest by the
deployment cost J_C + J_R + J_L. Ties are broken by the lexicographically
smallest action vector (splits, then vDU orders, then vCU orders).

This module is a deliberate second route: constraints and costs are
re-derived here with plain Python loops over the raw link list, sharing no
computation with the vectorized evaluator, so agreement between the two is
evidence rather than tautology. Verification helpers that do call the
evaluator say so explicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .evaluator import Allocation, CostBreakdown
from .splits import DEFAULT_CATALOG, Catalog, CostParams
from .substrate import LinkKind, NodeKind, SubstrateGraph
from .traffic import Request

DEFAULT_LIMIT = 10_000_000


class SearchSpaceTooLarge(RuntimeError):
    """Enumeration refused because the instance exceeds the search limit."""

    def __init__(self, search_size: int, limit: int):
        self.search_size = search_size
        self.limit = limit
        super().__init__(
            f"search space holds {search_size} assignments, over the limit of {limit}; "
            "the exact solver only handles tiny instances"
        )


@dataclass
class OracleResult:
    best_alloc: Allocation | None
    best_cost: CostBreakdown | None
    feasible_count: int
    search_size: int


def _adjacency(graph: SubstrateGraph):
    """Per-kind link maps (orders -> (bandwidth, delay)), read off the raw link list."""
    rh_es: dict[tuple[int, int], tuple[float, float]] = {}
    es_rc: dict[tuple[int, int], tuple[float, float]] = {}
    rh_rc: dict[tuple[int, int], tuple[float, float]] = {}
    table = {LinkKind.RH_ES: rh_es, LinkKind.ES_RC: es_rc, LinkKind.RH_RC: rh_rc}
    for link in graph.links:
        key = (graph.order_of(link.a), graph.order_of(link.b))
        table[link.kind][key] = (link.bandwidth_gbps, link.delay_ms)
    return rh_es, es_rc, rh_rc


def _capacities(graph: SubstrateGraph):
    es = [node.capacity for node in graph.nodes if node.kind is NodeKind.ES]
    rc = [node.capacity for node in graph.nodes if node.kind is NodeKind.RC]
    return es, rc


def constraint_report(
    alloc: Allocation,
    requests: list[Request],
    graph: SubstrateGraph,
    catalog: Catalog = DEFAULT_CATALOG,
) -> dict[str, bool]:
    """Hard-constraint verdicts, each True when satisfied.

    Covers link existence, host capacities, end-to-end and cross-haul
    latency bounds, and link bandwidths, computed with scalar loops.
    """
    rh_es, es_rc, rh_rc = _adjacency(graph)
    cap_es, cap_rc = _capacities(graph)
    n = alloc.n
    report = {
        "connectivity": True,
        "es_capacity": True,
        "rc_capacity": True,
        "e2e_latency": True,
        "crosshaul_latency": True,
        "bandwidth": True,
    }

    for r in range(n):
        s, d, c = int(alloc.split[r]), int(alloc.du[r]), int(alloc.cu[r])
        if s == 4:
            if (r, c) not in rh_rc:
                report["connectivity"] = False
        else:
            if (r, d) not in rh_es or (d, c) not in es_rc:
                report["connectivity"] = False
    if not report["connectivity"]:
        # quality checks are undefined over missing links
        for key in list(report):
            if key != "connectivity":
                report[key] = False
        return report

    es_load = [0.0] * len(cap_es)
    rc_load = [0.0] * len(cap_rc)
    link_traffic: dict[tuple[str, int, int], float] = {}
    for r in range(n):
        s, d, c = int(alloc.split[r]), int(alloc.du[r]), int(alloc.cu[r])
        spec = catalog[s - 1]
        lam = requests[r].load_mbps
        if s != 4:
            es_load[d] += spec.du_coeff * lam
        rc_load[c] += spec.cu_coeff * lam
        beta = spec.load_slope * (lam / 1000.0) + spec.load_offset_gbps
        if s == 4:
            link_traffic[("rc", r, c)] = link_traffic.get(("rc", r, c), 0.0) + beta
            e2e = rh_rc[(r, c)][1]
            cross = 0.0
        else:
            link_traffic[("dc", d, c)] = link_traffic.get(("dc", d, c), 0.0) + beta
            e2e = rh_es[(r, d)][1] + es_rc[(d, c)][1]
            cross = es_rc[(d, c)][1]
        if e2e > requests[r].latency_ms:
            report["e2e_latency"] = False
        if cross > spec.crosshaul_delay_bound_ms:
            report["crosshaul_latency"] = False

    for d, load in enumerate(es_load):
        if load > cap_es[d]:
            report["es_capacity"] = False
    for c, load in enumerate(rc_load):
        if load > cap_rc[c]:
            report["rc_capacity"] = False
    for (kind, i, j), traffic in link_traffic.items():
        bw = es_rc[(i, j)][0] if kind == "dc" else rh_rc[(i, j)][0]
        if traffic > bw:
            report["bandwidth"] = False
    return report


def _deployment_cost(
    prev: Allocation | None,
    alloc: Allocation,
    requests: list[Request],
    graph: SubstrateGraph,
    params: CostParams,
    catalog: Catalog,
) -> CostBreakdown:
    """J_C + J_R + J_L of a feasible assignment, scalar arithmetic only."""
    rh_es, es_rc, rh_rc = _adjacency(graph)
    j_compute = 0.0
    j_routing = 0.0
    for r in range(alloc.n):
        s, d, c = int(alloc.split[r]), int(alloc.du[r]), int(alloc.cu[r])
        spec = catalog[s - 1]
        lam = requests[r].load_mbps
        j_compute += params.du_price * spec.du_coeff * lam
        j_compute += params.cu_price * spec.cu_coeff * lam
        beta = spec.load_slope * (lam / 1000.0) + spec.load_offset_gbps
        delay = rh_rc[(r, c)][1] if s == 4 else es_rc[(d, c)][1]
        j_routing += params.routing_weight * delay * beta
    j_reconfig = 0.0
    if prev is not None:
        for r in range(alloc.n):
            stays_s4 = int(alloc.split[r]) == 4 and int(prev.split[r]) == 4
            if int(alloc.du[r]) != int(prev.du[r]) and not stays_s4:
                j_reconfig += 2.0 * params.reconfig_weight
            if int(alloc.cu[r]) != int(prev.cu[r]):
                j_reconfig += 2.0 * params.reconfig_weight
    return CostBreakdown(compute=j_compute, reconfig=j_reconfig, routing=j_routing, sla=0.0)


def enumerate_optimal(
    graph: SubstrateGraph,
    requests: list[Request],
    prev: Allocation | None = None,
    params: CostParams = CostParams(),
    catalog: Catalog = DEFAULT_CATALOG,
    limit: int = DEFAULT_LIMIT,
) -> OracleResult:
    """Minimize the deployment cost over every assignment by brute force.

    The search covers (4 |D| |C|)^N assignments and refuses to start if
    that exceeds `limit`. Returns the cheapest strictly feasible assignment
    or None when none exists.
    """
    n, n_es, n_rc = graph.n_rh, graph.n_es, graph.n_rc
    if len(requests) != n:
        raise ValueError(f"need one request per RH, got {len(requests)} for {n} RHs")
    search_size = (4 * n_es * n_rc) ** n
    if search_size > limit:
        raise SearchSpaceTooLarge(search_size, limit)

    per_rh = [
        [(s, d, c) for s in (1, 2, 3, 4) for d in range(n_es) for c in range(n_rc)]
    ] * n
    best_vec: tuple[int, ...] | None = None
    best_alloc: Allocation | None = None
    best_cost: CostBreakdown | None = None
    feasible = 0
    for combo in itertools.product(*per_rh):
        alloc = Allocation(
            split=[s for s, _, _ in combo],
            du=[d for _, d, _ in combo],
            cu=[c for _, _, c in combo],
        )
        report = constraint_report(alloc, requests, graph, catalog)
        if not all(report.values()):
            continue
        feasible += 1
        cost = _deployment_cost(prev, alloc, requests, graph, params, catalog)
        vec = tuple(int(s) for s, _, _ in combo) + tuple(
            int(d) for _, d, _ in combo
        ) + tuple(int(c) for _, _, c in combo)
        if (
            best_cost is None
            or cost.total < best_cost.total
            or (cost.total == best_cost.total and vec < best_vec)
        ):
            best_vec, best_alloc, best_cost = vec, alloc, cost
    return OracleResult(
        best_alloc=best_alloc,
        best_cost=best_cost,
        feasible_count=feasible,
        search_size=search_size,
    )


def verify_reward_alignment(
    graph: SubstrateGraph,
    requests: list[Request],
    params: CostParams = CostParams(),
    catalog: Catalog = DEFAULT_CATALOG,
    limit: int = DEFAULT_LIMIT,
) -> bool:
    """True iff reward maximization and cost minimization pick the same set.

    Cross-route by design: the cost side is this module's scalar
    enumeration, the reward side runs the vectorized evaluator's cost and
    reward. Vacuously true when no assignment is strictly feasible.
    """
    from . import evaluator

    n, n_es, n_rc = graph.n_rh, graph.n_es, graph.n_rc
    search_size = (4 * n_es * n_rc) ** n
    if search_size > limit:
        raise SearchSpaceTooLarge(search_size, limit)

    per_rh = [
        [(s, d, c) for s in (1, 2, 3, 4) for d in range(n_es) for c in range(n_rc)]
    ] * n
    best_j = None
    best_r = None
    argmin_j: set[tuple[int, ...]] = set()
    argmax_r: set[tuple[int, ...]] = set()
    for combo in itertools.product(*per_rh):
        alloc = Allocation(
            split=[s for s, _, _ in combo],
            du=[d for _, d, _ in combo],
            cu=[c for _, _, c in combo],
        )
        if not all(constraint_report(alloc, requests, graph, catalog).values()):
            continue
        vec = tuple(int(x) for x in alloc.split) + tuple(int(x) for x in alloc.du) + tuple(
            int(x) for x in alloc.cu
        )
        j = _deployment_cost(None, alloc, requests, graph, params, catalog).total
        ev_report = evaluator.check_connectivity(alloc, graph)
        ev_cost = evaluator.total_cost(None, alloc, requests, graph, params, catalog)
        r = evaluator.reward(ev_report, ev_cost, early_terminated=False, n_rh=n)
        if best_j is None or j < best_j:
            best_j, argmin_j = j, {vec}
        elif j == best_j:
            argmin_j.add(vec)
        if best_r is None or r > best_r:
            best_r, argmax_r = r, {vec}
        elif r == best_r:
            argmax_r.add(vec)
    return argmin_j == argmax_r
