"""Graph observation construction and the graph encoder network.

The substrate state is encoded as an attributed graph: one feature row per
node [remaining capacity, node order, demanded load, latency budget], with
entries that do not apply to a node kind left at zero, and one feature row
per directed edge [remaining bandwidth, delay]. Undirected links appear as
two directed edges so messages flow both ways.

The encoder projects node and edge features to a shared width, runs GINE
message passing (x_i' = MLP(x_i + sum over in-neighbors of
relu(x_j + e_ij))), and mean-pools node embeddings into one vector. The
edge projection is shared across layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .evaluator import NetworkLoad
from .substrate import LinkKind, NodeKind, SubstrateGraph
from .traffic import Request, SliceProfile

NODE_FEATURE_DIM = 4
EDGE_FEATURE_DIM = 2


@dataclass(frozen=True)
class ObsNorms:
    """Scales dividing raw observation quantities.

    Derived from configuration so that generated topologies of the same
    family share scales: loads by the largest slice load bound, delay-like
    values (link delays and latency budgets) by the largest link delay
    bound, capacities by the largest node capacity, bandwidths by the
    largest configured link bandwidth.
    """

    load_mbps: float
    delay_ms: float
    capacity_cc: float
    bandwidth_gbps: float

    @classmethod
    def for_graph(cls, graph: SubstrateGraph, profiles: dict[object, SliceProfile]) -> "ObsNorms":
        load = max((p.load_mbps[1] for p in profiles.values()), default=1.0)
        if graph.spec is not None:
            delay = max(graph.spec.delay_range_ms[1], graph.spec.direct_delay_range_ms[1])
            cap = max(graph.spec.es_capacity_cc, graph.spec.rc_capacity_cc)
            bw = max(graph.spec.bandwidth_range_gbps[1], graph.spec.direct_bandwidth_gbps)
        else:
            delay = max([link.delay_ms for link in graph.links] + [3.6])
            cap = max(node.capacity for node in graph.nodes)
            bw = max((link.bandwidth_gbps for link in graph.links), default=1.0)
        return cls(
            load_mbps=max(load, 1.0),
            delay_ms=max(delay, 1e-9),
            capacity_cc=max(cap, 1.0),
            bandwidth_gbps=max(bw, 1.0),
        )


def build_edge_index(graph: SubstrateGraph) -> np.ndarray:
    """Directed (2, 2L) source/target index pairs in link-list order."""
    index = np.zeros((2, 2 * len(graph.links)), dtype=np.int64)
    for k, link in enumerate(graph.links):
        index[:, 2 * k] = (link.a, link.b)
        index[:, 2 * k + 1] = (link.b, link.a)
    return index


def _remaining_bandwidth(graph: SubstrateGraph, load: NetworkLoad) -> np.ndarray:
    """Per-link remaining bandwidth in Gbps, link-list order."""
    rem = np.zeros(len(graph.links))
    for k, link in enumerate(graph.links):
        i, j = graph.order_of(link.a), graph.order_of(link.b)
        if link.kind is LinkKind.ES_RC:
            rem[k] = link.bandwidth_gbps - load.crosshaul[i, j]
        elif link.kind is LinkKind.RH_RC:
            rem[k] = link.bandwidth_gbps - load.direct[i, j]
        else:
            rem[k] = link.bandwidth_gbps
    return rem


def build_graph_obs(
    graph: SubstrateGraph,
    requests: list[Request],
    load: NetworkLoad,
    norms: ObsNorms,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Node features, directed edge index, and edge features for the encoder.

    Node rows follow global node-id order (RH block, ES block, RC block);
    the order feature is the within-kind order divided by the total node
    count. Remaining capacity and bandwidth reflect the load of the last
    accepted allocation and may go negative when a limit is violated.
    """
    n = graph.n_nodes
    feat = np.zeros((n, NODE_FEATURE_DIM), dtype=np.float32)
    orders = np.array([node.order for node in graph.nodes], dtype=np.float64)
    feat[:, 1] = orders / n
    rh = slice(0, graph.n_rh)
    es = slice(graph.n_rh, graph.n_rh + graph.n_es)
    rc = slice(graph.n_rh + graph.n_es, n)
    feat[rh, 2] = np.array([q.load_mbps for q in requests]) / norms.load_mbps
    feat[rh, 3] = np.array([q.latency_ms for q in requests]) / norms.delay_ms
    feat[es, 0] = (graph.cap_es - load.es_compute) / norms.capacity_cc
    feat[rc, 0] = (graph.cap_rc - load.rc_compute) / norms.capacity_cc

    edge_index = build_edge_index(graph)
    rem = _remaining_bandwidth(graph, load) / norms.bandwidth_gbps
    delays = np.array([link.delay_ms for link in graph.links]) / norms.delay_ms
    per_link = np.stack([rem, delays], axis=1)
    edge_feat = np.repeat(per_link, 2, axis=0).astype(np.float32)
    return feat, edge_index, edge_feat


# -- torch encoder ---------------------------------------------------------


@dataclass(frozen=True)
class EncoderConfig:
    embed_dim: int = 64
    hidden_dim: int = 1024
    n_layers: int = 2

    def validate(self) -> None:
        if min(self.embed_dim, self.hidden_dim, self.n_layers) < 1:
            raise ValueError("encoder dimensions and layer count must be positive")


def gine_update(
    x: torch.Tensor,
    edge_index: torch.Tensor,
    edge_attr: torch.Tensor,
    transform: nn.Module,
) -> torch.Tensor:
    """One GINE step: transform(x_i + sum_j relu(x_j + e_ji->i)).

    Accepts (n, F) or batched (B, n, F) node tensors; `edge_attr` may be
    (E, F) shared across the batch or (B, E, F). Nodes with no incoming
    edges keep transform(x_i).
    """
    squeeze = x.dim() == 2
    if squeeze:
        x = x.unsqueeze(0)
    if edge_attr.dim() == 2:
        edge_attr = edge_attr.unsqueeze(0).expand(x.size(0), -1, -1)
    src, dst = edge_index[0], edge_index[1]
    messages = torch.relu(x[:, src, :] + edge_attr)
    agg = torch.zeros_like(x)
    agg.index_add_(1, dst, messages)
    out = transform(x + agg)
    return out.squeeze(0) if squeeze else out


class GINELayer(nn.Module):
    """Edge-conditioned isomorphism layer with a two-layer MLP transform."""

    def __init__(self, embed_dim: int, hidden_dim: int):
        super().__init__()
        self.mlp = nn.Sequential(
            nn.Linear(embed_dim, hidden_dim),
            nn.ReLU(),
            nn.Linear(hidden_dim, embed_dim),
        )

    def forward(self, x: torch.Tensor, edge_index: torch.Tensor, edge_attr: torch.Tensor) -> torch.Tensor:
        return gine_update(x, edge_index, edge_attr, self.mlp)


class GraphEncoder(nn.Module):
    """Stacked GINE layers with mean pooling into a fixed-width embedding.

    Node and edge features pass through separate affine projections to the
    embedding width; the edge projection is computed once and shared by
    every layer. ReLU sits between consecutive layers but not after the
    last one, and pooling averages over nodes, so the output width is
    independent of the substrate size.
    """

    def __init__(
        self,
        node_dim: int = NODE_FEATURE_DIM,
        edge_dim: int = EDGE_FEATURE_DIM,
        config: EncoderConfig = EncoderConfig(),
    ):
        super().__init__()
        config.validate()
        self.config = config
        self.node_proj = nn.Linear(node_dim, config.embed_dim)
        self.edge_proj = nn.Linear(edge_dim, config.embed_dim)
        self.layers = nn.ModuleList(
            GINELayer(config.embed_dim, config.hidden_dim) for _ in range(config.n_layers)
        )

    @property
    def out_dim(self) -> int:
        return self.config.embed_dim

    def forward(
        self,
        node_feat: torch.Tensor,
        edge_index: torch.Tensor,
        edge_feat: torch.Tensor,
    ) -> torch.Tensor:
        x = self.node_proj(node_feat)
        e = self.edge_proj(edge_feat)
        for i, layer in enumerate(self.layers):
            if i:
                x = torch.relu(x)
            x = layer(x, edge_index, e)
        return x.mean(dim=-2)
