# Step through one placement episode by hand.
#
# Walks the environment API: reset, the static action mask, what happens on
# an infeasible proposal (the slot is retried, not skipped), and a feasible
# step with its cost breakdown. The good action comes from the exact solver,
# so the episode shows the best a policy could do on the first slot.
#
# Usage: python3 demos/02_environment_walkthrough.py

import numpy as np

from oranplace.environment import PlacementEnv
from oranplace.oracle import enumerate_optimal
from oranplace.substrate import TopologySpec, generate_topology
from oranplace.traffic import SessionConfig

graph = generate_topology(TopologySpec(n_rh=4, n_es=2, n_rc=1, seed=7))
env = PlacementEnv(graph, session=SessionConfig(episode_length=6), seed=3)
res = env.reset(seed=3)

print(f"flat observation length: {res.observation.flat.shape[0]} (= {env.flat_obs_dim})")
print(f"action heads: {env.action_nvec.tolist()}  (split x4, vDU host x4, vCU host x4)")

print("\nslot 0 requests:")
for req in env.state.requests:
    print(f"  RH{req.rh}: {req.slice.value}, {req.load_mbps:.0f} Mbps, {req.latency_ms:.1f} ms budget")

print("\nstatic mask (True = allowed by link existence):")
print(f"  split heads:\n{env.mask.split}")
print(f"  vDU heads:\n{env.mask.du}")
print(f"  vCU heads:\n{env.mask.cu}")

# propose a vDU host one RH is not wired to; the env refuses and waits
bad = np.zeros(12, dtype=np.int64)
bad[4:8] = env.mask.du.argmax(axis=1)  # an allowed host per RH
r, d = np.argwhere(~env.mask.du)[0]  # then break one on purpose
bad[4 + r] = d
res = env.step(bad)
print("\ninfeasible proposal:")
print(f"  reward {res.reward}, invalid streak {res.info['invalid_streak']}, slot {res.info['slot']}")
print(f"  disconnected RHs: {res.info['report'].n_fail} (state is unchanged, same slot retried)")

# ask the exact solver for the best allocation of the pending requests
best = enumerate_optimal(graph, env.state.requests)
alloc = best.best_alloc
action = np.concatenate([alloc.split - 1, alloc.du, alloc.cu])
res = env.step(action)
cost = res.info["cost"]
print("\nexact-solver action:")
print(f"  splits {alloc.split.tolist()}, vDU hosts {alloc.du.tolist()}, vCU hosts {alloc.cu.tolist()}")
print(f"  reward {res.reward:.4f}")
print(
    f"  cost {cost.total:.4f} = compute {cost.compute:.4f} + reconfig {cost.reconfig:.4f}"
    f" + routing {cost.routing:.4f} + sla {cost.sla:.4f}"
)

# keep replaying the same allocation; later slots pay no reconfiguration
total = res.reward
slot = 1
while not (res.terminated or res.truncated):
    res = env.step(action)
    total += res.reward
    tag = "ok" if res.info["cost"] is not None else "rejected"
    print(f"  slot {slot}: reward {res.reward:.4f} ({tag})")
    slot += 1
print(f"\nepisode return {total:.4f} over {env.session.episode_length} slots")
