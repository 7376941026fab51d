"""Build the qubit-graph families and export them.

Constructs every elementary unit (node, stick, triangle) in chain, ring,
and tree configurations, prints edge tallies and average degrees, and
writes DOT + JSON exports for one example of each family into
demos/output/.
"""

import os

from spinnet import build_graph, export_dot, neel_basis_index

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)


def describe(graph):
    internal = len(graph.edges_tagged("internal"))
    link = len(graph.edges_tagged("link"))
    print(f"  {graph.unit.value:8s} {graph.config.value:5s} L={graph.L:2d}: "
          f"{internal} internal + {link} link edges, "
          f"average degree {graph.average_degree:.2f}, "
          f"alternating initial index {neel_basis_index(graph)}")


print("Chains and rings from repeated units:")
for unit in ["node", "stick", "triangle"]:
    for config in ["chain", "ring"]:
        describe(build_graph(unit, config, 3))

print("\nBalanced binary tree of 8 node qubits:")
describe(build_graph("node", "tree", 8))

print("\nShared-strip triangle variant (any L >= 3):")
for L in [4, 7, 8]:
    describe(build_graph("triangle", "chain", L, triangle_rule="shared"))

print("\nSpine-linked sticks (units hang off a backbone):")
describe(build_graph("stick", "ring", 3, link_rule="spine"))

for name, graph in [
    ("node_ring_6", build_graph("node", "ring", 6)),
    ("stick_chain_3", build_graph("stick", "chain", 3)),
    ("triangle_ring_3", build_graph("triangle", "ring", 3)),
    ("node_tree_8", build_graph("node", "tree", 8)),
]:
    with open(os.path.join(OUT, f"{name}.dot"), "w") as f:
        f.write(export_dot(graph))
    with open(os.path.join(OUT, f"{name}.json"), "w") as f:
        f.write(graph.to_json() + "\n")
print(f"\nDOT and JSON exports written to {OUT}/")
