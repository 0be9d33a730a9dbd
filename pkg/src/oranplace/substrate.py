"""Physical substrate model: radio heads, edge servers, regional clouds.

The substrate is a three-layer graph. Radio heads (RH) aggregate the demand
of one slice request each, edge servers (ES) can host virtual DUs, regional
clouds (RC) can host virtual CUs. RH-ES and ES-RC links carry mid/cross-haul
traffic; optional direct RH-RC links are provisioned for the fully
centralized split. Generation is seeded and reproducible, and every
generated graph guarantees at least one ES neighbor per RH and at least one
RC neighbor per ES, so a feasible placement path exists for every RH.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class NodeKind(str, Enum):
    RH = "RH"
    ES = "ES"
    RC = "RC"


class LinkKind(str, Enum):
    RH_ES = "RH-ES"
    ES_RC = "ES-RC"
    RH_RC = "RH-RC"


# which node kinds a link kind is allowed to join, in (a, b) order
_LINK_ENDPOINTS = {
    LinkKind.RH_ES: (NodeKind.RH, NodeKind.ES),
    LinkKind.ES_RC: (NodeKind.ES, NodeKind.RC),
    LinkKind.RH_RC: (NodeKind.RH, NodeKind.RC),
}


class TopologyParseError(ValueError):
    """Raised when a topology document is malformed."""


@dataclass(frozen=True)
class SubstrateNode:
    """One substrate node. `order` is the node's index within its kind block."""

    id: int
    kind: NodeKind
    capacity: float
    order: int


@dataclass(frozen=True)
class Link:
    """Undirected link between node ids `a` and `b` (lower layer first)."""

    a: int
    b: int
    kind: LinkKind
    bandwidth_gbps: float
    delay_ms: float


@dataclass(frozen=True)
class TopologySpec:
    """Seeded recipe for topology generation.

    Link attributes are drawn uniformly from the closed ranges below.
    Every RH gets one uniformly chosen ES neighbor plus extras with
    probability `rh_es_extra_prob` per remaining pair; ES-RC links are wired
    the same way with `es_rc_extra_prob`. Each RH independently receives one
    direct RH-RC link with probability `split4_link_prob`; direct links use
    the fixed `direct_bandwidth_gbps` and the tighter delay range, which
    keeps them within the fully centralized split's latency budget by
    construction.
    """

    n_rh: int
    n_es: int
    n_rc: int
    seed: int = 0
    split4_link_prob: float = 0.1
    rh_es_extra_prob: float = 0.3
    es_rc_extra_prob: float = 0.5
    bandwidth_range_gbps: tuple[float, float] = (10.0, 40.0)
    delay_range_ms: tuple[float, float] = (0.0, 3.6)
    direct_bandwidth_gbps: float = 160.0
    direct_delay_range_ms: tuple[float, float] = (0.1, 0.25)
    es_capacity_cc: float = 20.0
    rc_capacity_cc: float = 100.0

    def validate(self) -> None:
        if min(self.n_rh, self.n_es, self.n_rc) < 1:
            raise ValueError(
                "topology needs at least one node of each kind, got "
                f"n_rh={self.n_rh} n_es={self.n_es} n_rc={self.n_rc}"
            )
        for name in ("split4_link_prob", "rh_es_extra_prob", "es_rc_extra_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        for name in ("bandwidth_range_gbps", "delay_range_ms", "direct_delay_range_ms"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0.0:
                raise ValueError(f"{name} must be 0 <= lo <= hi, got ({lo}, {hi})")
        if self.direct_bandwidth_gbps <= 0.0:
            raise ValueError("direct_bandwidth_gbps must be positive")
        if self.es_capacity_cc < 0.0 or self.rc_capacity_cc < 0.0:
            raise ValueError("node capacities must be nonnegative")


class SubstrateGraph:
    """Typed substrate graph with dense per-kind adjacency projections.

    Nodes are globally indexed in kind blocks: RHs first (ids 0..N-1), then
    ESs, then RCs. The constructor validates structure (block ordering,
    matching endpoint kinds, no self-loops, at most one link per node pair)
    but not reachability; generated graphs additionally guarantee the
    RH->ES->RC feasibility property, hand-built fixtures may omit links on
    purpose.

    Dense projections, indexed by within-kind order:
      e_rd / e_dc / e_rc   boolean adjacency (RHxES, ESxRC, RHxRC)
      d_rd / d_dc / d_rc   link delay in ms, 0 where absent
      bw_rd / bw_dc / bw_rc  link bandwidth in Gbps, 0 where absent
      cap_es / cap_rc      node compute capacities in CCs
    """

    def __init__(
        self,
        nodes: list[SubstrateNode],
        links: list[Link],
        spec: TopologySpec | None = None,
    ):
        self.nodes = list(nodes)
        self.links = list(links)
        self.spec = spec
        self._validate_nodes()
        self._validate_links()
        self._build_projections()

    # -- validation -------------------------------------------------------

    def _validate_nodes(self) -> None:
        counts = {NodeKind.RH: 0, NodeKind.ES: 0, NodeKind.RC: 0}
        for node in self.nodes:
            counts[node.kind] += 1
        self.n_rh = counts[NodeKind.RH]
        self.n_es = counts[NodeKind.ES]
        self.n_rc = counts[NodeKind.RC]
        if min(self.n_rh, self.n_es, self.n_rc) < 1:
            raise ValueError("graph needs at least one node of each kind")
        blocks = [NodeKind.RH] * self.n_rh + [NodeKind.ES] * self.n_es + [NodeKind.RC] * self.n_rc
        order_seen = 0
        prev_kind = None
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise ValueError(f"node ids must be contiguous from 0, got id {node.id} at position {i}")
            if node.kind is not blocks[i]:
                raise ValueError(f"node {i} must be {blocks[i].value} (kind blocks are RH, ES, RC)")
            if node.kind is not prev_kind:
                order_seen = 0
                prev_kind = node.kind
            if node.order != order_seen:
                raise ValueError(f"node {i} has order {node.order}, expected {order_seen}")
            order_seen += 1
            if node.capacity < 0.0:
                raise ValueError(f"node {i} has negative capacity")
            if node.kind is NodeKind.RH and node.capacity != 0.0:
                raise ValueError(f"RH node {i} must have zero compute capacity")

    def _validate_links(self) -> None:
        seen: set[tuple[int, int]] = set()
        n = len(self.nodes)
        for link in self.links:
            if not (0 <= link.a < n and 0 <= link.b < n):
                raise ValueError(f"link ({link.a}, {link.b}) references a missing node")
            if link.a == link.b:
                raise ValueError(f"self-loop on node {link.a}")
            pair = (min(link.a, link.b), max(link.a, link.b))
            if pair in seen:
                raise ValueError(f"duplicate link between nodes {pair[0]} and {pair[1]}")
            seen.add(pair)
            want = _LINK_ENDPOINTS[link.kind]
            got = (self.nodes[link.a].kind, self.nodes[link.b].kind)
            if got != want:
                raise ValueError(
                    f"link ({link.a}, {link.b}) of kind {link.kind.value} joins "
                    f"{got[0].value}-{got[1].value} nodes"
                )
            if link.bandwidth_gbps <= 0.0:
                raise ValueError(f"link ({link.a}, {link.b}) must have positive bandwidth")
            if link.delay_ms < 0.0:
                raise ValueError(f"link ({link.a}, {link.b}) has negative delay")

    def _build_projections(self) -> None:
        n, d, c = self.n_rh, self.n_es, self.n_rc
        self.e_rd = np.zeros((n, d), dtype=bool)
        self.e_dc = np.zeros((d, c), dtype=bool)
        self.e_rc = np.zeros((n, c), dtype=bool)
        self.d_rd = np.zeros((n, d))
        self.d_dc = np.zeros((d, c))
        self.d_rc = np.zeros((n, c))
        self.bw_rd = np.zeros((n, d))
        self.bw_dc = np.zeros((d, c))
        self.bw_rc = np.zeros((n, c))
        for link in self.links:
            i = self.order_of(link.a)
            j = self.order_of(link.b)
            if link.kind is LinkKind.RH_ES:
                e, de, bw = self.e_rd, self.d_rd, self.bw_rd
            elif link.kind is LinkKind.ES_RC:
                e, de, bw = self.e_dc, self.d_dc, self.bw_dc
            else:
                e, de, bw = self.e_rc, self.d_rc, self.bw_rc
            e[i, j] = True
            de[i, j] = link.delay_ms
            bw[i, j] = link.bandwidth_gbps
        self.cap_es = np.array([self.nodes[self.n_rh + k].capacity for k in range(d)])
        self.cap_rc = np.array([self.nodes[self.n_rh + self.n_es + k].capacity for k in range(c)])

    # -- lookups ----------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def kind_of(self, node_id: int) -> NodeKind:
        return self.nodes[node_id].kind

    def order_of(self, node_id: int) -> int:
        return self.nodes[node_id].order

    def node_id(self, kind: NodeKind, order: int) -> int:
        base = {NodeKind.RH: 0, NodeKind.ES: self.n_rh, NodeKind.RC: self.n_rh + self.n_es}[kind]
        count = {NodeKind.RH: self.n_rh, NodeKind.ES: self.n_es, NodeKind.RC: self.n_rc}[kind]
        if not 0 <= order < count:
            raise ValueError(f"no {kind.value} node with order {order}")
        return base + order

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubstrateGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.links == other.links and self.spec == other.spec

    def __repr__(self) -> str:
        return (
            f"SubstrateGraph(n_rh={self.n_rh}, n_es={self.n_es}, n_rc={self.n_rc}, "
            f"links={len(self.links)})"
        )


def path_exists(graph: SubstrateGraph, r: int, d: int, c: int) -> bool:
    """True iff RH ``r`` connects to ES ``d`` and ES ``d`` connects to RC ``c``.

    Arguments are global node ids; passing a node of the wrong kind is a
    usage error.
    """
    for node_id, kind in ((r, NodeKind.RH), (d, NodeKind.ES), (c, NodeKind.RC)):
        if not 0 <= node_id < graph.n_nodes:
            raise ValueError(f"node id {node_id} out of range")
        if graph.kind_of(node_id) is not kind:
            raise ValueError(f"node {node_id} is {graph.kind_of(node_id).value}, expected {kind.value}")
    ro, do, co = graph.order_of(r), graph.order_of(d), graph.order_of(c)
    return bool(graph.e_rd[ro, do] and graph.e_dc[do, co])


def generate_topology(spec: TopologySpec) -> SubstrateGraph:
    """Generate a substrate graph from a seeded spec.

    Deterministic for a fixed spec. Guarantees every RH at least one ES
    neighbor and every ES at least one RC neighbor.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    nodes: list[SubstrateNode] = []
    for i in range(spec.n_rh):
        nodes.append(SubstrateNode(i, NodeKind.RH, 0.0, i))
    for j in range(spec.n_es):
        nodes.append(SubstrateNode(spec.n_rh + j, NodeKind.ES, spec.es_capacity_cc, j))
    for k in range(spec.n_rc):
        nodes.append(SubstrateNode(spec.n_rh + spec.n_es + k, NodeKind.RC, spec.rc_capacity_cc, k))

    links: list[Link] = []

    def draw_link(a: int, b: int, kind: LinkKind) -> None:
        bw = rng.uniform(*spec.bandwidth_range_gbps)
        delay = rng.uniform(*spec.delay_range_ms)
        links.append(Link(a, b, kind, float(bw), float(delay)))

    es_id = lambda j: spec.n_rh + j
    rc_id = lambda k: spec.n_rh + spec.n_es + k

    for r in range(spec.n_rh):
        home = int(rng.integers(spec.n_es))
        draw_link(r, es_id(home), LinkKind.RH_ES)
        for j in range(spec.n_es):
            if j != home and rng.random() < spec.rh_es_extra_prob:
                draw_link(r, es_id(j), LinkKind.RH_ES)
    for j in range(spec.n_es):
        home = int(rng.integers(spec.n_rc))
        draw_link(es_id(j), rc_id(home), LinkKind.ES_RC)
        for k in range(spec.n_rc):
            if k != home and rng.random() < spec.es_rc_extra_prob:
                draw_link(es_id(j), rc_id(k), LinkKind.ES_RC)
    for r in range(spec.n_rh):
        if rng.random() < spec.split4_link_prob:
            k = int(rng.integers(spec.n_rc))
            delay = float(rng.uniform(*spec.direct_delay_range_ms))
            links.append(Link(r, rc_id(k), LinkKind.RH_RC, spec.direct_bandwidth_gbps, delay))

    return SubstrateGraph(nodes, links, spec=spec)


# -- serialization --------------------------------------------------------

_FORMAT_HEADER = "# oranplace topology v1"

_SPEC_FLOAT_PAIRS = ("bandwidth_range_gbps", "delay_range_ms", "direct_delay_range_ms")
_SPEC_INTS = ("n_rh", "n_es", "n_rc", "seed")
_SPEC_FLOATS = (
    "split4_link_prob",
    "rh_es_extra_prob",
    "es_rc_extra_prob",
    "direct_bandwidth_gbps",
    "es_capacity_cc",
    "rc_capacity_cc",
)


def serialize_topology(graph: SubstrateGraph) -> str:
    """Render a graph as a line-oriented text document that parses back equal."""
    out = [_FORMAT_HEADER]
    if graph.spec is not None:
        out.append("[spec]")
        for name in _SPEC_INTS:
            out.append(f"{name} = {getattr(graph.spec, name)}")
        for name in _SPEC_FLOATS:
            out.append(f"{name} = {getattr(graph.spec, name)!r}")
        for name in _SPEC_FLOAT_PAIRS:
            lo, hi = getattr(graph.spec, name)
            out.append(f"{name} = {lo!r} {hi!r}")
    out.append("[nodes]")
    out.append("# id kind order capacity")
    for node in graph.nodes:
        out.append(f"{node.id} {node.kind.value} {node.order} {node.capacity!r}")
    out.append("[links]")
    out.append("# a b kind bandwidth_gbps delay_ms")
    for link in graph.links:
        out.append(f"{link.a} {link.b} {link.kind.value} {link.bandwidth_gbps!r} {link.delay_ms!r}")
    return "\n".join(out) + "\n"


def parse_topology(text: str) -> SubstrateGraph:
    """Parse a topology document produced by :func:`serialize_topology`.

    Raises :class:`TopologyParseError` with the offending line number on any
    malformed or structurally invalid content.
    """
    spec_fields: dict[str, object] = {}
    nodes: list[SubstrateNode] = []
    links: list[Link] = []
    section = None
    saw_header = False

    def fail(lineno: int, msg: str) -> TopologyParseError:
        return TopologyParseError(f"line {lineno}: {msg}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line == _FORMAT_HEADER:
                saw_header = True
            continue
        if line.startswith("["):
            if line not in ("[spec]", "[nodes]", "[links]"):
                raise fail(lineno, f"unknown section {line}")
            section = line[1:-1]
            continue
        if section == "spec":
            if "=" not in line:
                raise fail(lineno, "expected 'key = value' in [spec]")
            key, _, value = line.partition("=")
            key = key.strip()
            parts = value.split()
            try:
                if key in _SPEC_INTS:
                    spec_fields[key] = int(parts[0])
                elif key in _SPEC_FLOATS:
                    spec_fields[key] = float(parts[0])
                elif key in _SPEC_FLOAT_PAIRS:
                    spec_fields[key] = (float(parts[0]), float(parts[1]))
                else:
                    raise fail(lineno, f"unknown spec field {key!r}")
            except (ValueError, IndexError) as exc:
                if isinstance(exc, TopologyParseError):
                    raise
                raise fail(lineno, f"bad value for spec field {key!r}: {value.strip()!r}") from exc
        elif section == "nodes":
            parts = line.split()
            if len(parts) != 4:
                raise fail(lineno, f"node line needs 4 fields (id kind order capacity), got {len(parts)}")
            try:
                kind = NodeKind(parts[1])
            except ValueError:
                raise fail(lineno, f"unknown node kind {parts[1]!r}") from None
            try:
                nodes.append(SubstrateNode(int(parts[0]), kind, float(parts[3]), int(parts[2])))
            except ValueError as exc:
                raise fail(lineno, f"bad node fields: {exc}") from exc
        elif section == "links":
            parts = line.split()
            if len(parts) != 5:
                raise fail(lineno, f"link line needs 5 fields (a b kind bandwidth delay), got {len(parts)}")
            try:
                kind = LinkKind(parts[2])
            except ValueError:
                raise fail(lineno, f"unknown link kind {parts[2]!r}") from None
            try:
                links.append(Link(int(parts[0]), int(parts[1]), kind, float(parts[3]), float(parts[4])))
            except ValueError as exc:
                raise fail(lineno, f"bad link fields: {exc}") from exc
        else:
            raise fail(lineno, "content before any section header")

    if not saw_header:
        raise TopologyParseError("missing format header line '# oranplace topology v1'")
    if not nodes:
        raise TopologyParseError("document defines no nodes")
    spec = TopologySpec(**spec_fields) if spec_fields else None  # type: ignore[arg-type]
    try:
        return SubstrateGraph(nodes, links, spec=spec)
    except ValueError as exc:
        raise TopologyParseError(str(exc)) from exc
