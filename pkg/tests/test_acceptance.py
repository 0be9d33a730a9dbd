"""End-to-end acceptance suite. One printed verdict line per criterion.

Run with output enabled to see the verdict lines:

    pytest tests/test_acceptance.py -v -s

The training smoke test trains masked and unmasked PPO for 100k steps and
the graph-encoder agent for the same budget, three seeds each; expect the
module to take roughly half an hour on one desktop core.
"""

import time

import numpy as np
import pytest
import torch
import yaml

from oranplace.agents.ppo import PpoAgent, PpoConfig
from oranplace.cli import main
from oranplace.config import RunConfig, TopologyConfig, config_to_yaml, load_config
from oranplace.encoder import NODE_FEATURE_DIM, EncoderConfig, GINELayer, GraphEncoder
from oranplace.environment import PlacementEnv
from oranplace.evaluator import (
    Allocation,
    check_connectivity,
    check_sla,
    compute_loads,
    total_cost,
)
from oranplace.oracle import constraint_report, enumerate_optimal, verify_reward_alignment
from oranplace.runner import load_topologies, make_agent, make_env, train
from oranplace.substrate import TopologySpec, generate_topology
from oranplace.traffic import DEFAULT_SLICE_PROFILES, SessionConfig, initial_requests

from test_encoder import encode_double, finite_difference_rel_error, numpy_gine, random_graph


def _verdict(name, ok, detail=""):
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}{suffix}")
    assert ok, f"acceptance criterion {name} failed{suffix}"


def _tiny_requests(n_rh, seed):
    rng = np.random.default_rng(seed)
    return initial_requests(n_rh, SessionConfig(), rng, DEFAULT_SLICE_PROFILES)


def test_oracle_equivalence():
    """Exact solver agrees with the evaluator on >=100 tiny instances."""
    t0 = time.monotonic()
    sizes = [(1, 1, 1), (2, 2, 1), (3, 2, 2)]
    checked = feasible = 0
    worst = 0.0
    aligned = True
    for n_rh, n_es, n_rc in sizes:
        for seed in range(36):
            graph = generate_topology(TopologySpec(n_rh, n_es, n_rc, seed=seed))
            reqs = _tiny_requests(n_rh, seed + 1000 * n_rh)
            result = enumerate_optimal(graph, reqs)
            if result.best_alloc is not None:
                cost = total_cost(None, result.best_alloc, reqs, graph)
                worst = max(worst, abs(cost.total - result.best_cost.total))
                feasible += 1
            aligned = aligned and verify_reward_alignment(graph, reqs)
            checked += 1
    elapsed = time.monotonic() - t0
    ok = checked >= 100 and feasible > 0 and worst < 1e-9 and aligned and elapsed < 60.0
    _verdict(
        "oracle-equivalence",
        ok,
        f"{checked} instances, {feasible} feasible, max cost gap {worst:.2e}, "
        f"alignment {aligned}, {elapsed:.1f}s",
    )


def test_constraint_checker_soundness():
    """Strict feasibility matches an independent per-constraint recheck."""
    instances = [(2, 2, 1, 0), (3, 2, 2, 1), (2, 1, 2, 2), (1, 2, 2, 3), (3, 2, 1, 4)]
    rng = np.random.default_rng(7)
    mismatches = total = 0
    for n_rh, n_es, n_rc, seed in instances:
        graph = generate_topology(TopologySpec(n_rh, n_es, n_rc, seed=seed))
        reqs = _tiny_requests(n_rh, seed)
        for _ in range(1000):
            alloc = Allocation(
                split=rng.integers(1, 5, n_rh),
                du=rng.integers(0, n_es, n_rh),
                cu=rng.integers(0, n_rc, n_rh),
            )
            report = check_connectivity(alloc, graph)
            if report.n_fail == 0:
                load = compute_loads(alloc, reqs, graph)
                strict = check_sla(alloc, reqs, graph, load).total == 0.0
            else:
                strict = False
            independent = all(constraint_report(alloc, reqs, graph).values())
            mismatches += strict != independent
            total += 1
    _verdict(
        "constraint-soundness",
        mismatches == 0,
        f"{total} random allocations over {len(instances)} instances, {mismatches} discrepancies",
    )


def test_reward_contract(mid_graph):
    """Reward cases over random actions on the 8-RH topology."""
    env = PlacementEnv(mid_graph, seed=0)
    env.reset(seed=0)
    rng = np.random.default_rng(1)
    nvec = env.action_nvec
    n_steps = 10_000
    feasible = invalid = terminal = 0
    violations = 0
    for step in range(n_steps):
        res = env.step(rng.integers(0, nvec))
        r = res.reward
        if not -1.0 <= r <= 1.0:
            violations += 1
        if res.terminated:
            terminal += 1
            if r != -1.0:
                violations += 1
        elif res.info["cost"] is None:
            invalid += 1
            if r != -res.info["report"].n_fail / 16.0:
                violations += 1
        else:
            feasible += 1
            if not 0.0 < r <= 1.0:
                violations += 1
        if res.terminated or res.truncated:
            env.reset(seed=10_000 + step)

    # deterministic early-termination case: the same disconnected proposal
    # five times in a row ends the episode at reward -1
    missing = np.argwhere(~mid_graph.e_rd)
    assert missing.size, "topology has a fully connected RH-ES stage"
    r0, d0 = missing[0]
    bad = np.zeros(nvec.shape, dtype=np.int64)
    bad[8 + r0] = d0
    env.reset(seed=77)
    n_fail = check_connectivity(
        Allocation(bad[:8] + 1, bad[8:16], bad[16:]), mid_graph
    ).n_fail
    streak = [env.step(bad) for _ in range(5)]
    streak_ok = (
        all(s.reward == -n_fail / 16.0 for s in streak[:4])
        and streak[4].reward == -1.0
        and streak[4].terminated
    )
    ok = violations == 0 and streak_ok and feasible > 0 and invalid > 0
    _verdict(
        "reward-contract",
        ok,
        f"{n_steps} actions: {feasible} feasible, {invalid} invalid, {terminal} terminal, "
        f"{violations} violations; streak case {streak_ok}",
    )


def test_masking_soundness(mid_graph, fork_graph):
    """Sampled masked actions never pick masked entries; the mask is not sufficient."""
    env = PlacementEnv(mid_graph, seed=0)
    env.reset(seed=0)
    agent = PpoAgent(env.describe(), PpoConfig(), kind="MPPO", seed=0)
    batch = 1000
    obs = agent.obs_arrays([env.observe()] * batch)
    masks = agent.mask_arrays([env.mask] * batch)
    n = mid_graph.n_rh
    rows = np.arange(n)[None, :]
    masked_picks = 0
    sampled = 0
    for _ in range(100):
        actions, _, _ = agent.act_batch(obs, masks)
        masked_picks += int((~env.mask.split[rows, actions[:, :n]]).sum())
        masked_picks += int((~env.mask.du[rows, actions[:, n : 2 * n]]).sum())
        masked_picks += int((~env.mask.cu[rows, actions[:, 2 * n :]]).sum())
        sampled += batch

    # necessary-but-not-sufficient: both hosts pass the static mask, yet the
    # pair has no ES-RC link, so the step lands in the negative-reward branch
    fenv = PlacementEnv(fork_graph, seed=0)
    fenv.reset(seed=0)
    allowed = bool(fenv.mask.du[0, 0]) and bool(fenv.mask.cu[0, 1])
    res = fenv.step(np.array([0, 0, 1]))
    incomplete = allowed and res.reward < 0.0 and res.info["report"].n_fail == 1
    _verdict(
        "masking-soundness",
        masked_picks == 0 and incomplete,
        f"{sampled} sampled actions, {masked_picks} masked picks; "
        f"mask-allowed infeasible step reward {res.reward}",
    )


def test_encoder_fidelity():
    """Message passing matches a hand-rolled reference; pooling is symmetric."""
    worst_ref = 0.0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        torch.manual_seed(seed)
        layer = GINELayer(8, 16).double()
        x, edge_index, edge_attr = random_graph(rng)
        got = layer(
            torch.from_numpy(x), torch.from_numpy(edge_index), torch.from_numpy(edge_attr)
        )
        want = numpy_gine(x, edge_index, edge_attr, layer)
        worst_ref = max(worst_ref, float(np.abs(got.detach().numpy() - want).max()))

    worst_perm = 0.0
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        torch.manual_seed(100 + seed)
        encoder = GraphEncoder(
            config=EncoderConfig(embed_dim=16, hidden_dim=32, n_layers=2)
        ).double()
        n = 6
        x = rng.standard_normal((n, NODE_FEATURE_DIM))
        x[:, 1] = 0.0  # node-order feature off
        edge_index = rng.integers(0, n, (2, 14))
        edge_attr = rng.standard_normal((14, 2))
        base = encode_double(encoder, x, edge_index, edge_attr)
        perm = rng.permutation(n)
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        permuted = encode_double(encoder, x[perm], inv[edge_index], edge_attr)
        worst_perm = max(worst_perm, float((base - permuted).detach().abs().max()))

    rng = np.random.default_rng(5)
    torch.manual_seed(5)
    encoder = GraphEncoder(config=EncoderConfig(embed_dim=8, hidden_dim=16, n_layers=2)).double()
    fd_err = finite_difference_rel_error(
        encoder,
        rng.standard_normal((4, NODE_FEATURE_DIM)),
        rng.integers(0, 4, (2, 8)),
        rng.standard_normal((8, 2)),
    )
    ok = worst_ref < 1e-6 and worst_perm < 1e-6 and fd_err < 1e-3
    _verdict(
        "encoder-fidelity",
        ok,
        f"reference gap {worst_ref:.2e}, permutation gap {worst_perm:.2e}, "
        f"gradient rel error {fd_err:.2e}",
    )


def test_constants_snapshot(capsys):
    """`config show` carries every pinned physical and training constant."""
    assert main(["config", "show"]) == 0
    doc = yaml.safe_load(capsys.readouterr().out)
    splits, topo, agent = doc["splits"], doc["topology"], doc["agent"]
    conditions = [
        splits["delay_bounds_ms"] == [10.0, 1.0, 0.25, 0.25],
        splits["load_slopes"] == [1.0, 1.0, 1.02, 0.0],
        splits["load_offsets_gbps"] == [0.0, 0.0, 0.5, 157.3],
        splits["du_coeffs"] == [0.05, 0.04, 0.00325, 0.0],
        splits["cu_coeffs"] == [0.0, 0.001, 0.00175, 0.05],
        topo["es_capacity_cc"] == 20.0,
        topo["rc_capacity_cc"] == 100.0,
        topo["bandwidth_range_gbps"] == [10.0, 40.0],
        topo["delay_range_ms"] == [0.0, 3.6],
        topo["direct_bandwidth_gbps"] == 160.0,
        topo["direct_delay_range_ms"] == [0.1, 0.25],
        agent["learning_rate"] == 1e-4,
        agent["batch_size"] == 128,
        agent["discount"] == 0.98,
        agent["gae_lambda"] == 0.97,
        agent["clip_range"] == 0.3,
        agent["entropy_coef"] == 1e-6,
    ]
    _verdict(
        "constants-snapshot",
        all(conditions),
        f"{sum(conditions)}/{len(conditions)} pinned values present",
    )


@pytest.fixture(scope="module")
def smoke_results(tmp_path_factory):
    root = tmp_path_factory.mktemp("smoke")

    def run(kind):
        cfg = RunConfig()
        cfg.agent.kind = kind
        cfg.run.seeds = (1, 2, 3)
        cfg.run.total_timesteps = 100_000
        cfg.run.eval_interval = 100_000
        cfg.run.eval_episodes = 10
        cfg.validate()
        t0 = time.monotonic()
        summaries = train(cfg, root / kind.lower())
        return summaries, time.monotonic() - t0

    return {kind: run(kind) for kind in ("MPPO", "PPO", "GPPO")}


def test_training_smoke(smoke_results):
    """Masked PPO solves the desk topology; unmasked PPO scores strictly lower."""
    mppo, t_mppo = smoke_results["MPPO"]
    ppo, t_ppo = smoke_results["PPO"]
    mppo_mean = float(np.mean([s["reward_mean"] for s in mppo.values()]))
    ppo_mean = float(np.mean([s["reward_mean"] for s in ppo.values()]))
    all_success = all(s["success_rate"] == 1.0 for s in mppo.values())
    elapsed = t_mppo + t_ppo
    ok = all_success and mppo_mean > 0.0 and ppo_mean < mppo_mean and elapsed <= 45 * 60
    _verdict(
        "training-smoke",
        ok,
        f"MPPO reward {mppo_mean:.2f} success 100%: {all_success}; "
        f"PPO reward {ppo_mean:.2f}; {elapsed / 60:.1f} min of 45",
    )


def test_training_smoke_gppo_report(smoke_results):
    """Graph-encoder agent at the same budget, reported without blocking."""
    mppo, _ = smoke_results["MPPO"]
    gppo, t_gppo = smoke_results["GPPO"]
    mppo_mean = float(np.mean([s["reward_mean"] for s in mppo.values()]))
    gppo_mean = float(np.mean([s["reward_mean"] for s in gppo.values()]))
    gppo_success = float(np.mean([s["success_rate"] for s in gppo.values()]))
    ordered = gppo_mean >= mppo_mean
    _verdict(
        "training-smoke-gppo-report",
        True,  # the ordering is informational at this budget
        f"GPPO reward {gppo_mean:.2f} (success {gppo_success:.0%}, {t_gppo / 60:.1f} min) "
        f"vs MPPO {mppo_mean:.2f}; GPPO >= MPPO: {ordered}, non-blocking",
    )


def test_full_scale_configs_documented(tmp_path):
    """Full-scale configs validate and construct, but are not run here."""
    checked = []
    for n_rh, n_es, n_rc in ((8, 3, 2), (64, 16, 4)):
        cfg = RunConfig()
        cfg.topology = TopologyConfig(n_rh=n_rh, n_es=n_es, n_rc=n_rc, seed=7)
        cfg.agent.kind = "GPPO"
        cfg.run.seeds = (1, 2, 3, 4, 5, 6)
        cfg.run.total_timesteps = 600_000
        cfg.validate()
        path = tmp_path / f"full-{n_rh}.yaml"
        path.write_text(config_to_yaml(cfg))
        assert load_config(path) == cfg
        # the harness can build the full pipeline for this scale
        [(name, graph)] = load_topologies(cfg)
        env = make_env(cfg, graph, name, seed=0)
        agent = make_agent(cfg, env.describe(), seed=1)
        res = env.reset(seed=0)
        actions, _, _ = agent.act_batch(
            agent.obs_arrays([res.observation]), agent.mask_arrays([env.mask])
        )
        assert actions.shape == (1, 3 * n_rh)
        checked.append(f"{n_rh}-RH")
    _verdict(
        "full-scale-documented",
        len(checked) == 2,
        f"{', '.join(checked)} configs at 600k steps x 6 seeds validate and construct; "
        "documented as not run at desk scale",
    )
