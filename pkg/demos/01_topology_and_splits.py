# Generate a small substrate and inspect the split catalog.
#
# Shows what the topology generator produces (node kinds, capacities, links)
# and what each functional split costs in crosshaul load, compute, and the
# latency bound its crosshaul segment must meet.
#
# Usage: python3 demos/01_topology_and_splits.py

from oranplace.splits import DEFAULT_CATALOG
from oranplace.substrate import TopologySpec, generate_topology

spec = TopologySpec(n_rh=4, n_es=2, n_rc=1, seed=7)
graph = generate_topology(spec)

print(f"substrate: {graph.n_rh} RH, {graph.n_es} ES, {graph.n_rc} RC")
for node in graph.nodes:
    print(f"  node {node.id}: {node.kind.name} #{node.order}, capacity {node.capacity} CC")

print(f"\nlinks ({len(graph.links)}):")
for link in graph.links:
    a, b = graph.nodes[link.a], graph.nodes[link.b]
    print(
        f"  {a.kind.name}{a.order} -- {b.kind.name}{b.order}: "
        f"{link.bandwidth_gbps:.1f} Gbps, {link.delay_ms:.2f} ms"
    )

print("\nsplit catalog at a 200 Mbps radio load:")
lam = 200.0
print(f"{'split':>5} {'crosshaul Gbps':>14} {'vDU CC':>8} {'vCU CC':>8} {'delay bound ms':>15}")
for split_spec in DEFAULT_CATALOG:
    beta = split_spec.crosshaul_load(lam)
    du, cu = split_spec.compute_demand(lam)
    print(
        f"{int(split_spec.id):>5} {beta:>14.3f} {du:>8.3f} {cu:>8.3f} "
        f"{split_spec.crosshaul_delay_bound_ms:>15.2f}"
    )

print("\nsplit 4 pushes everything to the RC, so it needs a direct RH-RC link")
print(f"direct RH-RC links in this draw: {int(graph.e_rc.sum())}")
