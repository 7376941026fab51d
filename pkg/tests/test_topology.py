import pytest

from spinnet.topology import (INTERNAL, LINK, ConfigKind, TriangleRule, UnitKind,
                              build_graph, export_dot, graph_from_json,
                              neel_basis_index, neel_index)


def test_node_chain_4_is_path():
    g = build_graph("node", "chain", 4)
    assert g.L == 4
    assert g.edge_pairs() == [(0, 1), (1, 2), (2, 3)]
    assert all(tag == LINK for _, _, tag in g.edges)


def test_stick_ring_3():
    g = build_graph("stick", "ring", 3)
    assert g.L == 6
    assert set(g.edges_tagged(INTERNAL)) == {(0, 1), (2, 3), (4, 5)}
    assert set(g.edges_tagged(LINK)) == {(1, 2), (3, 4), (0, 5)}


def test_node_tree_8_level_order():
    g = build_graph("node", "tree", 8)
    assert g.L == 8
    assert set(g.edge_pairs()) == {(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6), (3, 7)}
    assert len(g.edges) == 7
    assert g.is_connected()
    # depth of vertex 7 is 3: 7 -> 3 -> 1 -> 0
    parent = {j: i for i, j, _ in g.edges}
    depth, v = 0, 7
    while v != 0:
        v = parent[v]
        depth += 1
    assert depth == 3


EDGE_COUNTS = [
    ("node", "chain", lambda n: n - 1),
    ("node", "ring", lambda n: n),
    ("stick", "chain", lambda n: 2 * n - 1),
    ("stick", "ring", lambda n: 2 * n),
    ("triangle", "chain", lambda n: 4 * n - 1),
    ("triangle", "ring", lambda n: 4 * n),
]


@pytest.mark.parametrize("unit,config,formula", EDGE_COUNTS)
@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_edge_count_formulas(unit, config, formula, n):
    g = build_graph(unit, config, n)
    assert g.n_edges == formula(n)
    assert g.is_connected()
    g.validate()


@pytest.mark.parametrize("unit", ["node", "stick", "triangle"])
@pytest.mark.parametrize("n", [3, 5, 8])
def test_ring_denser_than_chain(unit, n):
    ring = build_graph(unit, "ring", n)
    chain = build_graph(unit, "chain", n)
    assert ring.average_degree > chain.average_degree


def test_build_is_deterministic():
    a = build_graph("triangle", "ring", 4)
    b = build_graph("triangle", "ring", 4)
    assert a == b
    assert a.edges == b.edges


def test_ring_needs_three_units():
    with pytest.raises(ValueError, match="ring requires at least 3 units"):
        build_graph("stick", "ring", 2)


def test_tree_rejects_non_node_units():
    with pytest.raises(ValueError, match="only the node unit"):
        build_graph("stick", "tree", 4)


def test_single_node_rejected():
    with pytest.raises(ValueError):
        build_graph("node", "chain", 1)


def test_shared_triangle_strip_chain():
    g = build_graph("triangle", "chain", 7, triangle_rule="shared")
    assert g.L == 7
    assert g.n_edges == 2 * 7 - 3
    assert set(g.edges_tagged(INTERNAL)) == {(i, i + 1) for i in range(6)}
    assert set(g.edges_tagged(LINK)) == {(i, i + 2) for i in range(5)}


def test_shared_triangle_strip_ring():
    g = build_graph("triangle", "ring", 8, triangle_rule=TriangleRule.SHARED)
    assert g.L == 8
    assert g.n_edges == 16
    degrees = [0] * 8
    for i, j, _ in g.edges:
        degrees[i] += 1
        degrees[j] += 1
    assert degrees == [4] * 8


def test_shared_triangle_small_rings_deduplicate():
    # closing both rails modulo L collides below L=6
    assert build_graph("triangle", "ring", 4, triangle_rule="shared").n_edges == 6
    assert build_graph("triangle", "ring", 5, triangle_rule="shared").n_edges == 10


def test_neel_indices():
    assert neel_index(1) == 0
    assert neel_index(2) == 2
    assert neel_index(4) == 10
    assert neel_basis_index(build_graph("node", "chain", 4)) == 10


def test_export_dot_node_chain_2():
    dot = export_dot(build_graph("node", "chain", 2))
    edge_lines = [ln for ln in dot.splitlines() if "--" in ln]
    assert len(edge_lines) == 1
    assert "0 -- 1" in edge_lines[0]


def test_export_dot_stick_chain_2_styles():
    dot = export_dot(build_graph("stick", "chain", 2))
    edge_lines = [ln for ln in dot.splitlines() if "--" in ln]
    assert len(edge_lines) == 3
    assert sum("gray" in ln for ln in edge_lines) == 2
    assert sum("red" in ln for ln in edge_lines) == 1


def test_export_dot_triangle_ring_3():
    dot = export_dot(build_graph("triangle", "ring", 3))
    assert sum("--" in ln for ln in dot.splitlines()) == 12


def test_json_round_trip():
    g = build_graph("stick", "ring", 4)
    g2 = graph_from_json(g.to_json())
    assert g2 == g


def test_json_schema():
    d = build_graph("node", "chain", 3).to_json_dict()
    assert d == {"L": 3, "unit": "node", "config": "chain",
                 "edges": [[0, 1, "link"], [1, 2, "link"]]}


def test_json_rejects_bad_keys():
    with pytest.raises(ValueError, match="keys"):
        graph_from_json('{"L": 2, "unit": "node", "edges": []}')


def test_enum_coercion():
    g = build_graph(UnitKind.NODE, ConfigKind.RING, 5)
    assert g == build_graph("node", "ring", 5)
