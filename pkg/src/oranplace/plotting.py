"""Reward-curve and final-performance figures from metrics streams."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import yaml

from .metrics import read_records


def _run_label(run_dir: Path) -> str:
    config_path = run_dir / "config.yaml"
    if config_path.exists():
        data = yaml.safe_load(config_path.read_text()) or {}
        kind = data.get("agent", {}).get("kind")
        if kind:
            return str(kind)
    return run_dir.name


def _seed_dirs(run_dir: Path) -> list[Path]:
    dirs = sorted(p for p in run_dir.glob("seed-*") if p.is_dir())
    return dirs or [run_dir]


def _reward_series(seed_dir: Path) -> tuple[np.ndarray, np.ndarray]:
    records = [
        r
        for r in read_records(seed_dir / "metrics.jsonl")
        if r.get("record") == "rollout" and "ep_reward_mean" in r
    ]
    x = np.array([r["timestep"] for r in records], dtype=float)
    y = np.array([r["ep_reward_mean"] for r in records], dtype=float)
    return x, y


def plot_reward_curves(run_dirs: list[str | Path], out_path: str | Path) -> Path:
    """Episode-reward training curves, one line per run with a std band over seeds."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        series = [_reward_series(d) for d in _seed_dirs(run_dir)]
        series = [(x, y) for x, y in series if len(x)]
        if not series:
            continue
        n = min(len(x) for x, _ in series)
        x = series[0][0][:n]
        ys = np.stack([y[:n] for _, y in series])
        mean, std = ys.mean(axis=0), ys.std(axis=0)
        ax.plot(x, mean, label=f"{_run_label(run_dir)} ({len(series)} seeds)")
        ax.fill_between(x, mean - std, mean + std, alpha=0.2)
    ax.set_xlabel("environment steps")
    ax.set_ylabel("episode reward (rolling mean)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def _final_eval_episodes(seed_dir: Path) -> list[dict]:
    records = [
        r for r in read_records(seed_dir / "metrics.jsonl") if r.get("record") == "eval_episode"
    ]
    if not records:
        return []
    last = max(r["timestep"] for r in records)
    return [r for r in records if r["timestep"] == last]


def plot_final_bars(run_dirs: list[str | Path], out_path: str | Path) -> Path:
    """Final-evaluation reward and deployment cost, mean and std per run."""
    labels, reward_mean, reward_std, cost_mean, cost_std = [], [], [], [], []
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        episodes = [e for d in _seed_dirs(run_dir) for e in _final_eval_episodes(d)]
        if not episodes:
            continue
        rewards = np.array([e["reward"] for e in episodes], dtype=float)
        costs = np.array(
            [e["deploy_cost"] for e in episodes if e.get("success") and e.get("deploy_cost") is not None],
            dtype=float,
        )
        labels.append(_run_label(run_dir))
        reward_mean.append(rewards.mean())
        reward_std.append(rewards.std())
        cost_mean.append(costs.mean() if costs.size else np.nan)
        cost_std.append(costs.std() if costs.size else 0.0)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    pos = np.arange(len(labels))
    ax1.bar(pos, reward_mean, yerr=reward_std, capsize=4)
    ax1.set_xticks(pos, labels)
    ax1.set_ylabel("episode reward")
    ax1.set_title("final evaluation reward")
    ax2.bar(pos, cost_mean, yerr=cost_std, capsize=4, color="tab:orange")
    ax2.set_xticks(pos, labels)
    ax2.set_ylabel("deployment cost")
    ax2.set_title("final deployment cost (successful episodes)")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
