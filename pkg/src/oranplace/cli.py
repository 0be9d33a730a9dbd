"""Command-line interface.

Verbs: train, eval, plot, oracle, topo gen, config show. Run artifacts go
under --out when given, else under $ORAN_RUN_DIR, else ./runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path


def _output_root(out: str | None) -> Path:
    if out:
        return Path(out)
    return Path(os.environ.get("ORAN_RUN_DIR", "runs"))


def _load_cli_config(args: argparse.Namespace):
    from .config import load_config

    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "agent", None):
        cfg.agent.kind = args.agent
    if getattr(args, "timesteps", None):
        cfg.run.total_timesteps = args.timesteps
    if getattr(args, "topology", None):
        cfg.topology.file = args.topology
        cfg.topology.files = ()
    if getattr(args, "seed", None) is not None:
        cfg.run.seeds = (args.seed,)
    if getattr(args, "seeds", None):
        cfg.run.seeds = tuple(int(s) for s in args.seeds.split(","))
    cfg.validate()
    return cfg


def cmd_train(args: argparse.Namespace) -> int:
    from .runner import train

    cfg = _load_cli_config(args)
    if args.out:
        out_dir = Path(args.out)
    elif cfg.run.out_dir:
        out_dir = Path(cfg.run.out_dir)
    else:
        stamp = time.strftime("%Y%m%d-%H%M%S")
        out_dir = _output_root(None) / f"{cfg.agent.kind.lower()}-{stamp}"
    summaries = train(cfg, out_dir)
    print(f"run directory: {out_dir}")
    for seed, summary in summaries.items():
        print(f"seed {seed}: {json.dumps(summary, sort_keys=True)}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    from .agents import DdpgAgent, PpoAgent
    from .config import load_config
    from .runner import evaluate_policy, load_topologies, make_env

    run_dir = Path(args.run)
    config_path = run_dir / "config.yaml"
    if args.config:
        config_path = Path(args.config)
    if not config_path.exists():
        print(f"error: no config at {config_path}", file=sys.stderr)
        return 2
    cfg = load_config(config_path)

    if args.checkpoint:
        ckpt = Path(args.checkpoint)
    else:
        seed_dirs = sorted(run_dir.glob("seed-*"))
        if not seed_dirs:
            print(f"error: no seed directories under {run_dir}", file=sys.stderr)
            return 2
        ckpt = seed_dirs[0] / "checkpoints" / "final.pt"
    if not ckpt.exists():
        print(f"error: checkpoint {ckpt} does not exist", file=sys.stderr)
        return 2

    loader = DdpgAgent if cfg.agent.kind == "DDPG" else PpoAgent
    agent = loader.load(ckpt)
    envs = [
        make_env(cfg, graph, name, seed=None) for name, graph in load_topologies(cfg)
    ]
    episodes, summary = evaluate_policy(
        envs, agent.policy(deterministic=True), args.episodes, base_seed=args.seed
    )
    out = {
        "checkpoint": str(ckpt),
        "agent": cfg.agent.kind,
        **summary,
        "episode_rewards": [e.reward for e in episodes],
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    from .plotting import plot_final_bars, plot_reward_curves

    out_dir = Path(args.out)
    curve = plot_reward_curves(args.runs, out_dir / "reward_curves.png")
    bars = plot_final_bars(args.runs, out_dir / "final_performance.png")
    print(f"wrote {curve}")
    print(f"wrote {bars}")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    import numpy as np

    from .config import load_config
    from .oracle import SearchSpaceTooLarge, enumerate_optimal
    from .substrate import parse_topology
    from .traffic import initial_requests

    cfg = load_config(args.config)
    graph = parse_topology(Path(args.topology).read_text())
    rng = np.random.default_rng(args.request_seed)
    requests = initial_requests(graph.n_rh, cfg.traffic.session(), rng, cfg.traffic.profiles())
    try:
        result = enumerate_optimal(
            graph,
            requests,
            prev=None,
            params=cfg.costs.params(),
            catalog=cfg.splits.catalog(),
            limit=args.limit,
        )
    except SearchSpaceTooLarge as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    record = {
        "search_size": result.search_size,
        "feasible_count": result.feasible_count,
        "requests": [
            {"rh": q.rh, "slice": q.slice.value, "load_mbps": q.load_mbps, "latency_ms": q.latency_ms}
            for q in requests
        ],
    }
    if result.best_alloc is None:
        record["feasible"] = False
    else:
        record["feasible"] = True
        record["best"] = {
            "split": result.best_alloc.split.tolist(),
            "du": result.best_alloc.du.tolist(),
            "cu": result.best_alloc.cu.tolist(),
        }
        record["cost"] = {
            "compute": result.best_cost.compute,
            "reconfig": result.best_cost.reconfig,
            "routing": result.best_cost.routing,
            "sla": result.best_cost.sla,
            "total": result.best_cost.total,
        }
    print(json.dumps(record, indent=2, sort_keys=True))
    return 0


def cmd_topo_gen(args: argparse.Namespace) -> int:
    from .substrate import TopologySpec, generate_topology, serialize_topology

    spec = TopologySpec(
        n_rh=args.rh,
        n_es=args.es,
        n_rc=args.rc,
        seed=args.seed,
        split4_link_prob=args.split4_prob,
    )
    graph = generate_topology(spec)
    text = serialize_topology(graph)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print(f"wrote {args.out} ({graph.n_nodes} nodes, {len(graph.links)} links)")
    else:
        print(text, end="")
    return 0


def cmd_config_show(args: argparse.Namespace) -> int:
    from .config import config_show_text, load_config

    print(config_show_text(load_config(args.config)), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oranplace",
        description="Functional-split and placement simulator, exact solver, and RL agents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train an agent")
    p_train.add_argument("--config", help="YAML config file")
    p_train.add_argument("--agent", help="agent kind: GPPO, MPPO, PPO, or DDPG")
    p_train.add_argument("--seed", type=int, help="single training seed")
    p_train.add_argument("--seeds", help="comma-separated training seeds")
    p_train.add_argument("--timesteps", type=int, help="total environment steps")
    p_train.add_argument("--topology", help="topology file to train on")
    p_train.add_argument("--out", help="run directory")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a trained run")
    p_eval.add_argument("--run", required=True, help="run directory from train")
    p_eval.add_argument("--checkpoint", help="checkpoint path (default: first seed's final)")
    p_eval.add_argument("--config", help="config override (default: run dir config.yaml)")
    p_eval.add_argument("--episodes", type=int, default=10)
    p_eval.add_argument("--seed", type=int, default=0, help="evaluation episode seed base")
    p_eval.set_defaults(func=cmd_eval)

    p_plot = sub.add_parser("plot", help="plot metrics of one or more runs")
    p_plot.add_argument("--runs", nargs="+", required=True, help="run directories")
    p_plot.add_argument("--out", required=True, help="directory for figures")
    p_plot.set_defaults(func=cmd_plot)

    p_oracle = sub.add_parser("oracle", help="exact solver on a tiny topology")
    p_oracle.add_argument("--topology", required=True, help="topology file")
    p_oracle.add_argument("--request-seed", type=int, default=0)
    p_oracle.add_argument("--config", help="YAML config for constants")
    p_oracle.add_argument("--limit", type=int, default=10_000_000)
    p_oracle.set_defaults(func=cmd_oracle)

    p_topo = sub.add_parser("topo", help="topology utilities")
    topo_sub = p_topo.add_subparsers(dest="topo_command", required=True)
    p_gen = topo_sub.add_parser("gen", help="generate a topology file")
    p_gen.add_argument("--rh", type=int, required=True)
    p_gen.add_argument("--es", type=int, required=True)
    p_gen.add_argument("--rc", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--split4-prob", type=float, default=0.1)
    p_gen.add_argument("--out", help="output file (default: stdout)")
    p_gen.set_defaults(func=cmd_topo_gen)

    p_config = sub.add_parser("config", help="configuration utilities")
    config_sub = p_config.add_subparsers(dest="config_command", required=True)
    p_show = config_sub.add_parser("show", help="print the effective config")
    p_show.add_argument("--config", help="YAML config file to merge over defaults")
    p_show.set_defaults(func=cmd_config_show)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
