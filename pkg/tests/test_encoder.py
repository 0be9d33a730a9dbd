"""Graph observation construction and GINE encoder numerics."""

import numpy as np
import pytest
import torch
from torch import nn

from oranplace.encoder import (
    EDGE_FEATURE_DIM,
    NODE_FEATURE_DIM,
    EncoderConfig,
    GINELayer,
    GraphEncoder,
    ObsNorms,
    _remaining_bandwidth,
    build_edge_index,
    build_graph_obs,
    gine_update,
)
from oranplace.evaluator import NetworkLoad
from oranplace.traffic import DEFAULT_SLICE_PROFILES

from conftest import make_request


def test_norms_from_spec(desk_graph):
    norms = ObsNorms.for_graph(desk_graph, DEFAULT_SLICE_PROFILES)
    assert norms.load_mbps == 300.0
    assert norms.delay_ms == 3.6
    assert norms.capacity_cc == 100.0
    assert norms.bandwidth_gbps == 160.0


def test_norms_fallback_without_spec(line_graph):
    norms = ObsNorms.for_graph(line_graph, DEFAULT_SLICE_PROFILES)
    assert norms.delay_ms == 3.6  # floor when hand-built links are faster
    assert norms.capacity_cc == 100.0
    assert norms.bandwidth_gbps == 20.0


def test_edge_index_directed_pairs(line_graph):
    index = build_edge_index(line_graph)
    assert index.tolist() == [[0, 1, 1, 2], [1, 0, 2, 1]]


def test_remaining_bandwidth_tracks_load(line_graph):
    load = NetworkLoad.zeros(1, 1, 1)
    load.crosshaul[0, 0] = 0.5
    rem = _remaining_bandwidth(line_graph, load)
    assert rem.tolist() == [20.0, 19.5]  # RH-ES links never carry cross-haul load


def test_node_feature_layout(fork_graph):
    reqs = [make_request(150.0, 1.8)]
    load = NetworkLoad.zeros(1, 2, 2)
    load.es_compute[1] = 4.0
    norms = ObsNorms.for_graph(fork_graph, DEFAULT_SLICE_PROFILES)
    feat, index, edge_feat = build_graph_obs(fork_graph, reqs, load, norms)
    assert feat.shape == (5, NODE_FEATURE_DIM)
    assert feat[0].tolist() == pytest.approx([0.0, 0.0, 0.5, 0.5])
    assert feat[1].tolist() == pytest.approx([0.2, 0.0, 0.0, 0.0])  # ES0 20/100
    assert feat[2].tolist() == pytest.approx([0.16, 0.2, 0.0, 0.0])  # ES1 lost 4 CC
    assert feat[3].tolist() == pytest.approx([1.0, 0.0, 0.0, 0.0])
    assert feat[4].tolist() == pytest.approx([1.0, 0.2, 0.0, 0.0])
    assert edge_feat.shape == (index.shape[1], EDGE_FEATURE_DIM)
    assert np.array_equal(edge_feat[0::2], edge_feat[1::2])  # both directions alike


def test_gine_identity_case():
    x = torch.eye(2, dtype=torch.float64)
    edge_index = torch.tensor([[0, 1], [1, 0]])
    edge_attr = torch.zeros(2, 2, dtype=torch.float64)
    out = gine_update(x, edge_index, edge_attr, nn.Identity())
    assert torch.equal(out, torch.ones(2, 2, dtype=torch.float64))


def test_gine_keeps_isolated_nodes():
    x = torch.tensor([[1.0, 2.0], [3.0, 4.0]], dtype=torch.float64)
    edge_index = torch.tensor([[0], [1]])  # only 0 -> 1
    edge_attr = torch.zeros(1, 2, dtype=torch.float64)
    out = gine_update(x, edge_index, edge_attr, nn.Identity())
    assert torch.equal(out[0], x[0])
    assert torch.equal(out[1], x[1] + torch.relu(x[0]))


def numpy_gine(x, edge_index, edge_attr, layer):
    w1 = layer.mlp[0].weight.detach().numpy()
    b1 = layer.mlp[0].bias.detach().numpy()
    w2 = layer.mlp[2].weight.detach().numpy()
    b2 = layer.mlp[2].bias.detach().numpy()
    agg = x.copy()
    for k in range(edge_index.shape[1]):
        s, d = edge_index[:, k]
        agg[d] = agg[d] + np.maximum(x[s] + edge_attr[k], 0.0)
    hidden = np.maximum(agg @ w1.T + b1, 0.0)
    return hidden @ w2.T + b2


def random_graph(rng, n=5, dim=8, n_edges=12):
    x = rng.standard_normal((n, dim))
    edge_index = rng.integers(0, n, (2, n_edges))
    edge_attr = rng.standard_normal((n_edges, dim))
    return x, edge_index, edge_attr


def test_gine_matches_numpy_reference():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        torch.manual_seed(seed)
        layer = GINELayer(8, 16).double()
        x, edge_index, edge_attr = random_graph(rng)
        got = layer(
            torch.from_numpy(x), torch.from_numpy(edge_index), torch.from_numpy(edge_attr)
        )
        want = numpy_gine(x, edge_index, edge_attr, layer)
        assert np.abs(got.detach().numpy() - want).max() < 1e-6


def test_gine_batched_matches_loop():
    rng = np.random.default_rng(3)
    torch.manual_seed(3)
    layer = GINELayer(8, 16).double()
    xs = rng.standard_normal((4, 5, 8))
    edge_index = torch.from_numpy(rng.integers(0, 5, (2, 12)))
    edge_attr = torch.from_numpy(rng.standard_normal((12, 8)))
    batched = layer(torch.from_numpy(xs), edge_index, edge_attr)
    for b in range(4):
        single = layer(torch.from_numpy(xs[b]), edge_index, edge_attr)
        assert torch.allclose(batched[b], single, atol=1e-12)


def encode_double(encoder, x, edge_index, edge_attr):
    return encoder(
        torch.as_tensor(x, dtype=torch.float64),
        torch.as_tensor(edge_index),
        torch.as_tensor(edge_attr, dtype=torch.float64),
    )


def test_encoder_permutation_invariance():
    rng = np.random.default_rng(11)
    torch.manual_seed(11)
    encoder = GraphEncoder(config=EncoderConfig(embed_dim=16, hidden_dim=32, n_layers=2)).double()
    n = 6
    x = rng.standard_normal((n, NODE_FEATURE_DIM))
    x[:, 1] = 0.0  # node-order feature off, nothing else breaks symmetry
    edge_index = rng.integers(0, n, (2, 14))
    edge_attr = rng.standard_normal((14, EDGE_FEATURE_DIM))
    base = encode_double(encoder, x, edge_index, edge_attr)

    perm = rng.permutation(n)
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    permuted = encode_double(encoder, x[perm], inv[edge_index], edge_attr)
    assert torch.allclose(base, permuted, atol=1e-6)


def test_encoder_order_feature_breaks_symmetry():
    # the order column encodes a node's position, so a relabeled copy of the
    # graph carries different order values and embeds differently
    rng = np.random.default_rng(12)
    torch.manual_seed(12)
    encoder = GraphEncoder(config=EncoderConfig(embed_dim=16, hidden_dim=32, n_layers=2)).double()
    n = 6
    x = rng.standard_normal((n, NODE_FEATURE_DIM))
    x[:, 1] = np.arange(n) / n
    edge_index = rng.integers(0, n, (2, 14))
    edge_attr = rng.standard_normal((14, EDGE_FEATURE_DIM))
    base = encode_double(encoder, x, edge_index, edge_attr)
    perm = rng.permutation(n)
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    relabeled = x[perm].copy()
    relabeled[:, 1] = np.arange(n) / n
    permuted = encode_double(encoder, relabeled, inv[edge_index], edge_attr)
    assert not torch.allclose(base, permuted, atol=1e-6)


def finite_difference_rel_error(encoder, x, edge_index, edge_attr, eps=1e-6):
    """Max relative error between analytic and central-difference gradients."""
    xt = torch.tensor(x, dtype=torch.float64, requires_grad=True)
    out = encode_double(encoder, xt, edge_index, edge_attr).sum()
    out.backward()
    analytic = xt.grad.numpy()
    worst = 0.0
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            hi = x.copy()
            hi[i, j] += eps
            lo = x.copy()
            lo[i, j] -= eps
            fd = (
                encode_double(encoder, hi, edge_index, edge_attr).sum().item()
                - encode_double(encoder, lo, edge_index, edge_attr).sum().item()
            ) / (2.0 * eps)
            err = abs(fd - analytic[i, j]) / max(abs(fd), 1e-3)
            worst = max(worst, err)
    return worst


def test_encoder_gradient_check():
    rng = np.random.default_rng(5)
    torch.manual_seed(5)
    encoder = GraphEncoder(config=EncoderConfig(embed_dim=8, hidden_dim=16, n_layers=2)).double()
    x = rng.standard_normal((4, NODE_FEATURE_DIM))
    edge_index = rng.integers(0, 4, (2, 8))
    edge_attr = rng.standard_normal((8, EDGE_FEATURE_DIM))
    assert finite_difference_rel_error(encoder, x, edge_index, edge_attr) < 1e-3


def test_encoder_output_width_fixed():
    torch.manual_seed(0)
    encoder = GraphEncoder(config=EncoderConfig(embed_dim=16, hidden_dim=32, n_layers=1)).double()
    rng = np.random.default_rng(0)
    for n in (3, 7):
        x = rng.standard_normal((n, NODE_FEATURE_DIM))
        edge_index = rng.integers(0, n, (2, 2 * n))
        edge_attr = rng.standard_normal((2 * n, EDGE_FEATURE_DIM))
        out = encode_double(encoder, x, edge_index, edge_attr)
        assert out.shape == (16,)
    assert encoder.out_dim == 16


def test_encoder_batched_forward():
    torch.manual_seed(1)
    encoder = GraphEncoder(config=EncoderConfig(embed_dim=8, hidden_dim=16, n_layers=2)).double()
    rng = np.random.default_rng(1)
    xs = rng.standard_normal((3, 5, NODE_FEATURE_DIM))
    edge_index = rng.integers(0, 5, (2, 10))
    edge_attr = rng.standard_normal((10, EDGE_FEATURE_DIM))
    batched = encoder(
        torch.as_tensor(xs), torch.as_tensor(edge_index), torch.as_tensor(edge_attr)
    )
    assert batched.shape == (3, 8)
    for b in range(3):
        single = encode_double(encoder, xs[b], edge_index, edge_attr)
        assert torch.allclose(batched[b], single, atol=1e-12)


def test_encoder_config_validation():
    with pytest.raises(ValueError, match="positive"):
        EncoderConfig(embed_dim=0).validate()
    with pytest.raises(ValueError, match="positive"):
        GraphEncoder(config=EncoderConfig(n_layers=0))
