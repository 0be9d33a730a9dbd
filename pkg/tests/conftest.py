"""Shared fixtures: hand-built graphs with known attributes plus generated ones."""

import pytest

from oranplace.substrate import (
    Link,
    LinkKind,
    NodeKind,
    SubstrateGraph,
    SubstrateNode,
    TopologySpec,
    generate_topology,
)
from oranplace.traffic import Request, SliceType


def build_graph(n_rh, n_es, n_rc, links, es_cap=20.0, rc_cap=100.0):
    """Hand-built graph; links are (kind, a_order, b_order, bw, delay) tuples."""
    nodes = [SubstrateNode(r, NodeKind.RH, 0.0, r) for r in range(n_rh)]
    nodes += [SubstrateNode(n_rh + j, NodeKind.ES, es_cap, j) for j in range(n_es)]
    nodes += [SubstrateNode(n_rh + n_es + k, NodeKind.RC, rc_cap, k) for k in range(n_rc)]
    out = []
    for kind, a, b, bw, delay in links:
        if kind is LinkKind.RH_ES:
            out.append(Link(a, n_rh + b, kind, bw, delay))
        elif kind is LinkKind.ES_RC:
            out.append(Link(n_rh + a, n_rh + n_es + b, kind, bw, delay))
        else:
            out.append(Link(a, n_rh + n_es + b, kind, bw, delay))
    return SubstrateGraph(nodes, out)


def make_request(load_mbps, latency_ms, rh=0, slice_type=SliceType.EMBB):
    return Request(rh, slice_type, load_mbps, latency_ms)


@pytest.fixture
def line_graph():
    """1 RH - 1 ES - 1 RC chain: RH-ES delay 1.0 ms, ES-RC delay 0.2 ms."""
    return build_graph(
        1,
        1,
        1,
        [
            (LinkKind.RH_ES, 0, 0, 20.0, 1.0),
            (LinkKind.ES_RC, 0, 0, 20.0, 0.2),
        ],
    )


@pytest.fixture
def line_graph_direct():
    """Chain plus a direct RH-RC link so the centralized split is reachable."""
    return build_graph(
        1,
        1,
        1,
        [
            (LinkKind.RH_ES, 0, 0, 20.0, 1.0),
            (LinkKind.ES_RC, 0, 0, 20.0, 0.2),
            (LinkKind.RH_RC, 0, 0, 160.0, 0.1),
        ],
    )


@pytest.fixture
def fork_graph():
    """1 RH, 2 ES, 2 RC with only the diagonal ES-RC links present.

    The mask allows every (du, cu) combination because each ES reaches some
    RC, yet (du=0, cu=1) and (du=1, cu=0) route over missing links. This is
    the documented incompleteness of the static mask.
    """
    return build_graph(
        1,
        2,
        2,
        [
            (LinkKind.RH_ES, 0, 0, 20.0, 0.5),
            (LinkKind.RH_ES, 0, 1, 20.0, 0.5),
            (LinkKind.ES_RC, 0, 0, 20.0, 0.5),
            (LinkKind.ES_RC, 1, 1, 20.0, 0.5),
        ],
    )


@pytest.fixture
def desk_graph():
    """The default 4 RH / 2 ES / 1 RC training topology."""
    return generate_topology(TopologySpec(4, 2, 1, seed=7))


@pytest.fixture
def mid_graph():
    """8 RH / 3 ES / 2 RC, large enough that exact enumeration is refused."""
    return generate_topology(TopologySpec(8, 3, 2, seed=42))
