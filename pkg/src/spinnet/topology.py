"""Qubit connectivity graphs assembled from repeating elementary units.

Three elementary units are supported: ``node`` (a single qubit), ``stick``
(a bonded pair) and ``triangle`` (a fully bonded triple).  Units are
repeated in a chain, closed into a ring, or arranged as a balanced binary
tree.  Edges are tagged ``internal`` (bonds inside a unit, where gates
would act) or ``link`` (bonds joining consecutive units), so that noise
models and visualisations can distinguish the two roles.

Qubits are indexed globally, unit by unit in composition order: unit k of
a u-qubit unit owns indices ``k*u .. k*u + u - 1``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum

INTERNAL = "internal"
LINK = "link"

Edge = tuple[int, int, str]


class UnitKind(Enum):
    NODE = "node"
    STICK = "stick"
    TRIANGLE = "triangle"

    @property
    def n_qubits(self) -> int:
        return _UNIT_SIZE[self]

    @property
    def internal_bonds(self) -> tuple[tuple[int, int], ...]:
        """Within-unit bonds, as index offsets from the unit's first qubit."""
        return _UNIT_BONDS[self]


_UNIT_SIZE = {UnitKind.NODE: 1, UnitKind.STICK: 2, UnitKind.TRIANGLE: 3}
_UNIT_BONDS = {
    UnitKind.NODE: (),
    UnitKind.STICK: ((0, 1),),
    UnitKind.TRIANGLE: ((0, 1), (0, 2), (1, 2)),
}


class ConfigKind(Enum):
    CHAIN = "chain"
    RING = "ring"
    TREE = "tree"


class TriangleRule(Enum):
    """Composition rule for triangle units.

    LINKED keeps units disjoint (three fresh qubits each) and joins
    consecutive units with a single link edge, so L = 3 * n_units.

    SHARED lays triangles along a strip where consecutive triangles share
    an edge: qubits 0..L-1 carry rail bonds (i, i+1) and skip bonds
    (i, i+2).  Here ``n_units`` counts strip qubits (L itself), which
    admits any L >= 3; a ring closes both rails modulo L.  Closure
    duplicates at L < 6 are dropped (L = 4 and 5 give complete graphs).
    """

    LINKED = "linked"
    SHARED = "shared"


class LinkRule(Enum):
    """Which qubits the inter-unit link edges join.

    CONSECUTIVE joins the last qubit of unit k to the first qubit of unit
    k + 1, threading the units into a path (a ring of sticks is then a
    plain even cycle).  SPINE joins the first qubits of consecutive units,
    so multi-qubit units hang off a backbone (a ring of sticks becomes a
    cycle with pendant qubits).  The two coincide for single-qubit units.
    """

    CONSECUTIVE = "consecutive"
    SPINE = "spine"


@dataclass(frozen=True)
class QubitGraph:
    """Immutable qubit connectivity graph.

    ``edges`` holds (i, j, tag) triples with i < j, no duplicate pairs,
    in deterministic construction order.
    """

    L: int
    unit: UnitKind
    config: ConfigKind
    edges: tuple[Edge, ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _ in self.edges]

    def edges_tagged(self, tag: str) -> list[tuple[int, int]]:
        return [(i, j) for i, j, t in self.edges if t == tag]

    @property
    def average_degree(self) -> float:
        return 2.0 * len(self.edges) / self.L

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.L)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def is_connected(self) -> bool:
        if self.L == 0:
            return False
        adj = self.neighbors()
        seen = [False] * self.L
        queue = deque([0])
        seen[0] = True
        count = 1
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    queue.append(w)
        return count == self.L

    def validate(self) -> None:
        """Raise ValueError on any violated structural invariant."""
        if self.L < 2:
            raise ValueError(f"graph needs at least 2 qubits, got L={self.L}")
        pairs = set()
        for i, j, tag in self.edges:
            if not (0 <= i < j < self.L):
                raise ValueError(f"edge ({i}, {j}) out of range for L={self.L}")
            if tag not in (INTERNAL, LINK):
                raise ValueError(f"unknown edge tag {tag!r}")
            if (i, j) in pairs:
                raise ValueError(f"duplicate edge ({i}, {j})")
            pairs.add((i, j))
        if not self.is_connected():
            raise ValueError("graph is not connected")

    def to_json_dict(self) -> dict:
        return {
            "L": self.L,
            "unit": self.unit.value,
            "config": self.config.value,
            "edges": [[i, j, tag] for i, j, tag in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def graph_from_json(text: str) -> QubitGraph:
    """Rebuild a QubitGraph from its JSON serialization (validated)."""
    d = json.loads(text)
    expected = {"L", "unit", "config", "edges"}
    if set(d) != expected:
        raise ValueError(f"graph JSON must have keys {sorted(expected)}, got {sorted(d)}")
    edges = tuple((int(i), int(j), str(tag)) for i, j, tag in d["edges"])
    g = QubitGraph(L=int(d["L"]), unit=UnitKind(d["unit"]),
                   config=ConfigKind(d["config"]), edges=edges)
    g.validate()
    return g


def build_graph(
    unit: UnitKind | str,
    config: ConfigKind | str,
    n_units: int,
    triangle_rule: TriangleRule | str = TriangleRule.LINKED,
    link_rule: LinkRule | str = LinkRule.CONSECUTIVE,
) -> QubitGraph:
    """Compose ``n_units`` copies of ``unit`` into the given configuration.

    One link edge joins consecutive units (placement per ``link_rule``);
    rings additionally link the last unit back to the first.  Trees (node
    unit only) place units at the vertices of a balanced binary tree
    filled level by level, left to right.

    For the triangle SHARED rule, ``n_units`` counts strip qubits; see
    TriangleRule.
    """
    unit = UnitKind(unit)
    config = ConfigKind(config)
    triangle_rule = TriangleRule(triangle_rule)
    link_rule = LinkRule(link_rule)
    if n_units < 1:
        raise ValueError(f"n_units must be >= 1, got {n_units}")

    if unit is UnitKind.TRIANGLE and triangle_rule is TriangleRule.SHARED:
        g = _build_shared_triangle_strip(config, n_units)
    elif config is ConfigKind.TREE:
        g = _build_tree(unit, n_units)
    else:
        g = _build_linked(unit, config, n_units, link_rule)
    g.validate()
    return g


def _build_linked(unit: UnitKind, config: ConfigKind, n_units: int,
                  link_rule: LinkRule) -> QubitGraph:
    u = unit.n_qubits
    L = u * n_units
    if L < 2:
        raise ValueError(f"{unit.value} {config.value} with {n_units} unit(s) has only "
                         f"{L} qubit(s); at least 2 are required")
    if config is ConfigKind.RING and n_units < 3:
        raise ValueError(f"ring requires at least 3 units, got {n_units} "
                         f"({n_units} {unit.value} unit(s) cannot form a ring)")
    edges: list[Edge] = []
    for k in range(n_units):
        base = k * u
        for a, b in unit.internal_bonds:
            edges.append((base + a, base + b, INTERNAL))
        if k + 1 < n_units:
            if link_rule is LinkRule.CONSECUTIVE:
                edges.append((base + u - 1, base + u, LINK))
            else:
                edges.append((base, base + u, LINK))
    if config is ConfigKind.RING:
        if link_rule is LinkRule.CONSECUTIVE:
            edges.append((0, L - 1, LINK))
        else:
            edges.append((0, (n_units - 1) * u, LINK))
    return QubitGraph(L=L, unit=unit, config=config, edges=tuple(edges))


def _build_tree(unit: UnitKind, n_units: int) -> QubitGraph:
    if unit is not UnitKind.NODE:
        raise ValueError(f"tree configuration supports only the node unit, got {unit.value}")
    if n_units < 2:
        raise ValueError(f"tree needs at least 2 node units, got {n_units}")
    # Balanced binary tree, vertices filled in level order: parent of k is (k-1)//2.
    edges = tuple(((k - 1) // 2, k, LINK) for k in range(1, n_units))
    return QubitGraph(L=n_units, unit=unit, config=ConfigKind.TREE, edges=edges)


def _build_shared_triangle_strip(config: ConfigKind, L: int) -> QubitGraph:
    if config is ConfigKind.TREE:
        raise ValueError("tree configuration supports only the node unit, got triangle")
    if L < 3:
        raise ValueError(f"shared triangle strip needs at least 3 qubits, got {L}")
    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()

    def add(i: int, j: int, tag: str) -> None:
        i, j = (i, j) if i < j else (j, i)
        if (i, j) not in seen:
            seen.add((i, j))
            edges.append((i, j, tag))

    if config is ConfigKind.CHAIN:
        for i in range(L - 1):
            add(i, i + 1, INTERNAL)
        for i in range(L - 2):
            add(i, i + 2, LINK)
    else:  # ring: close both rails modulo L
        for i in range(L):
            add(i, (i + 1) % L, INTERNAL)
        for i in range(L):
            add(i, (i + 2) % L, LINK)
    return QubitGraph(L=L, unit=UnitKind.TRIANGLE, config=config, edges=tuple(edges))


def neel_index(L: int) -> int:
    """Basis index of the alternating state (up, down, up, ...) on L qubits.

    Bit convention (shared by all modules): bit i of the index is set iff
    qubit i is spin-down, so the index is the sum of 2**i over odd i < L.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    return sum(1 << i for i in range(1, L, 2))


def neel_basis_index(graph: QubitGraph) -> int:
    """Néel initial-state index for a graph, by global qubit index parity."""
    return neel_index(graph.L)


def export_dot(graph: QubitGraph) -> str:
    """Render the graph as DOT text.

    Internal edges are solid gray, link edges red; vertices are labeled by
    qubit index.
    """
    name = f"{graph.unit.value}_{graph.config.value}_L{graph.L}"
    lines = [f'graph "{name}" {{', "  node [shape=circle];"]
    for v in range(graph.L):
        lines.append(f"  {v};")
    for i, j, tag in graph.edges:
        if tag == INTERNAL:
            style = "color=gray, style=solid"
        else:
            style = "color=red"
        lines.append(f"  {i} -- {j} [{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
