"""Brute-force exact solver: hand instances, tie-breaks, refusal, verdicts."""

import numpy as np
import pytest

from oranplace.evaluator import Allocation, check_connectivity, total_cost
from oranplace.oracle import (
    DEFAULT_LIMIT,
    SearchSpaceTooLarge,
    constraint_report,
    enumerate_optimal,
    verify_reward_alignment,
)
from oranplace.substrate import LinkKind, TopologySpec, generate_topology

from conftest import build_graph, make_request


def test_hand_instance_line_graph(line_graph):
    # splits priced at load 100 Mbps: 10.02, 8.12, and 0.9454; the
    # centralized split has no direct link so only three are feasible
    reqs = [make_request(100.0, 50.0)]
    result = enumerate_optimal(line_graph, reqs)
    assert result.search_size == 4
    assert result.feasible_count == 3
    assert result.best_alloc == Allocation([3], [0], [0])
    assert result.best_cost.total == pytest.approx(0.9454, abs=1e-9)
    assert result.best_cost.compute == pytest.approx(0.825, abs=1e-12)
    assert result.best_cost.routing == pytest.approx(0.1204, abs=1e-12)


def test_hand_instance_with_direct_link(line_graph_direct):
    reqs = [make_request(100.0, 50.0)]
    result = enumerate_optimal(line_graph_direct, reqs)
    assert result.feasible_count == 4
    assert result.best_alloc == Allocation([3], [0], [0])
    assert result.best_cost.total == pytest.approx(0.9454, abs=1e-9)


def test_infeasible_when_latency_unreachable(line_graph):
    reqs = [make_request(100.0, 0.5)]  # best path needs 1.2 ms
    result = enumerate_optimal(line_graph, reqs)
    assert result.feasible_count == 0
    assert result.best_alloc is None and result.best_cost is None


def tie_graph():
    """Two interchangeable ES hosts in front of one RC."""
    return build_graph(
        1,
        2,
        1,
        [
            (LinkKind.RH_ES, 0, 0, 20.0, 1.0),
            (LinkKind.RH_ES, 0, 1, 20.0, 1.0),
            (LinkKind.ES_RC, 0, 0, 20.0, 0.2),
            (LinkKind.ES_RC, 1, 0, 20.0, 0.2),
        ],
    )


def test_tie_break_lexicographic():
    result = enumerate_optimal(tie_graph(), [make_request(100.0, 50.0)])
    assert result.best_alloc == Allocation([3], [0], [0])  # du 0 and 1 tie on cost


def test_prev_allocation_steers_ties():
    prev = Allocation([3], [1], [0])
    result = enumerate_optimal(tie_graph(), [make_request(100.0, 50.0)], prev=prev)
    assert result.best_alloc == Allocation([3], [1], [0])  # staying avoids reconfig
    assert result.best_cost.reconfig == 0.0


def test_refusal_before_enumeration(mid_graph):
    reqs = [make_request(100.0, 50.0, rh=r) for r in range(8)]
    with pytest.raises(SearchSpaceTooLarge) as exc:
        enumerate_optimal(mid_graph, reqs)
    assert exc.value.search_size == 24**8
    assert exc.value.limit == DEFAULT_LIMIT
    with pytest.raises(SearchSpaceTooLarge):
        verify_reward_alignment(mid_graph, reqs)


def test_custom_limit_allows_small_search(line_graph):
    with pytest.raises(SearchSpaceTooLarge):
        enumerate_optimal(line_graph, [make_request(100.0, 50.0)], limit=3)


def test_no_links_means_no_feasible():
    g = build_graph(1, 1, 1, [])
    result = enumerate_optimal(g, [make_request(100.0, 50.0)])
    assert result.search_size == 4
    assert result.feasible_count == 0
    assert result.best_alloc is None


def test_request_count_checked(line_graph):
    with pytest.raises(ValueError, match="one request per RH"):
        enumerate_optimal(line_graph, [])


def test_constraint_verdicts_all_pass(line_graph):
    report = constraint_report(Allocation([1], [0], [0]), [make_request(100.0, 50.0)], line_graph)
    assert all(report.values())


def test_constraint_verdicts_disconnected(line_graph):
    report = constraint_report(Allocation([4], [0], [0]), [make_request(100.0, 50.0)], line_graph)
    assert not report["connectivity"]
    assert not any(report.values())  # quality checks undefined without links


def test_constraint_verdict_es_capacity(line_graph):
    report = constraint_report(Allocation([1], [0], [0]), [make_request(500.0, 50.0)], line_graph)
    assert not report["es_capacity"]
    assert report["connectivity"] and report["e2e_latency"] and report["bandwidth"]


def test_constraint_verdict_bandwidth():
    g = build_graph(
        1,
        1,
        1,
        [(LinkKind.RH_ES, 0, 0, 20.0, 0.1), (LinkKind.ES_RC, 0, 0, 0.1, 0.1)],
    )
    report = constraint_report(Allocation([1], [0], [0]), [make_request(200.0, 50.0)], g)
    assert not report["bandwidth"]
    assert report["es_capacity"]


def test_constraint_verdict_crosshaul_latency():
    g = build_graph(
        1,
        1,
        1,
        [(LinkKind.RH_ES, 0, 0, 20.0, 0.1), (LinkKind.ES_RC, 0, 0, 20.0, 0.3)],
    )
    report = constraint_report(Allocation([3], [0], [0]), [make_request(100.0, 50.0)], g)
    assert not report["crosshaul_latency"]  # 0.3 ms over the 0.25 ms bound
    assert report["e2e_latency"]


def test_boundary_equality_is_feasible():
    # loads and delays exactly at their limits do not violate
    g = build_graph(
        1,
        1,
        1,
        [(LinkKind.RH_ES, 0, 0, 20.0, 0.5), (LinkKind.ES_RC, 0, 0, 20.0, 0.25)],
    )
    report = constraint_report(Allocation([3], [0], [0]), [make_request(400.0, 0.75)], g)
    assert report["crosshaul_latency"] and report["e2e_latency"]
    report_cap = constraint_report(Allocation([1], [0], [0]), [make_request(400.0, 50.0)], g)
    assert report_cap["es_capacity"]  # 0.05 * 400 = 20 CC exactly


def test_oracle_matches_evaluator_on_random_instances():
    rng = np.random.default_rng(0)
    checked = 0
    for seed in range(8):
        graph = generate_topology(TopologySpec(2, 2, 1, seed=seed))
        reqs = [
            make_request(float(rng.uniform(20, 300)), float(rng.uniform(2, 20)), rh=r)
            for r in range(2)
        ]
        result = enumerate_optimal(graph, reqs)
        if result.best_alloc is None:
            continue
        report = check_connectivity(result.best_alloc, graph)
        assert report.n_fail == 0
        cost = total_cost(None, result.best_alloc, reqs, graph)
        assert cost.sla == 0.0
        assert abs(cost.total - result.best_cost.total) < 1e-9
        checked += 1
    assert checked >= 3


def test_reward_alignment_on_hand_instances(line_graph):
    assert verify_reward_alignment(line_graph, [make_request(100.0, 50.0)])
    assert verify_reward_alignment(tie_graph(), [make_request(100.0, 50.0)])
    # vacuous when nothing is feasible
    assert verify_reward_alignment(line_graph, [make_request(100.0, 0.5)])
