# Train a masked agent briefly and plot its learning curve.
#
# Runs a short masked-PPO session on the default 4-RH substrate, prints the
# final greedy evaluation, and renders the reward curve and final-reward bar
# chart. Bump --timesteps to 100000 to watch it reach a 100% success rate
# (takes a minute or two on one core).
#
# Usage: python3 demos/05_train_and_plot.py [--agent MPPO] [--timesteps 10000]

import argparse
from pathlib import Path

from oranplace.config import RunConfig
from oranplace.plotting import plot_final_bars, plot_reward_curves
from oranplace.runner import train

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--agent", default="MPPO", choices=["PPO", "MPPO", "GPPO", "DDPG"])
parser.add_argument("--timesteps", type=int, default=10_000)
parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2])
parser.add_argument("--out", type=Path, default=Path("runs/demo"))
args = parser.parse_args()

cfg = RunConfig()
cfg.agent.kind = args.agent
cfg.run.seeds = tuple(args.seeds)
cfg.run.total_timesteps = args.timesteps
cfg.run.eval_interval = args.timesteps  # evaluate once, at the end
cfg.run.eval_episodes = 5
cfg.validate()

out_dir = args.out / args.agent.lower()
summaries = train(cfg, out_dir)

print("\nfinal greedy evaluation per seed:")
for seed, summary in summaries.items():
    line = (
        f"  seed {seed}: reward {summary['reward_mean']:.2f}"
        f" +- {summary['reward_std']:.2f}, success {summary['success_rate']:.0%}"
    )
    if "cost_mean" in summary:
        line += f", deploy cost {summary['cost_mean']:.1f}"
    print(line)

curve = plot_reward_curves([out_dir], args.out / "reward_curve.png")
bars = plot_final_bars([out_dir], args.out / "final_rewards.png")
print(f"\nwrote {curve} and {bars}")
print(f"run artifacts (config, metrics.jsonl, checkpoints) under {out_dir}")
