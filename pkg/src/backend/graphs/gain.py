"""
Group-labelled graphs, their biased graphs and frame matroids.

A gain is stored once per edge, for the orientation the edge was declared
with; reading the edge the other way gives the inverse. Loop gains are read
as stored in both directions.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

from src.backend.algebra.groups import FiniteGroup
from src.backend.config_loader import CONFIG
from src.backend.errors import GainError, check_budget
from src.backend.graphs.multigraph import THETA, Bicycle, Cycle, Multigraph
from src.backend.matroids.matroid import Matroid

logger = logging.getLogger(__name__)

FOREST = "forest"


class Gaining:
    """
    A Γ-gaining of a multigraph.

    Args:
        graph: underlying multigraph; each edge's (u, v) is its stored orientation
        group: the gain group
        gains: element index per edge label, read along u -> v
    """

    def __init__(self, graph: Multigraph, group: FiniteGroup, gains: Mapping[str, int]):
        missing = [e.label for e in graph.edges if e.label not in gains]
        if missing:
            raise GainError(f"edges without a gain: {missing}")
        extra = set(gains) - {e.label for e in graph.edges}
        if extra:
            raise GainError(f"gains for unknown edges: {sorted(extra)}")
        for label, g in gains.items():
            if not 0 <= g < group.order:
                raise GainError(f"gain {g} on edge {label} is not an element of {group.label}")
        self.graph = graph
        self.group = group
        self._gains: Dict[str, int] = {e.label: int(gains[e.label]) for e in graph.edges}

    @property
    def gains(self) -> Dict[str, int]:
        return dict(self._gains)

    def gain(self, label: str) -> int:
        return self._gains[label]

    def oriented(self, label: str, tail: str) -> int:
        """σ(e, tail, head)."""
        e = self.graph.edge(label)
        g = self._gains[label]
        if e.is_loop:
            if tail != e.u:
                raise GainError(f"{tail} is not the vertex of loop {label}")
            return g
        if tail == e.u:
            return g
        if tail == e.v:
            return self.group.inv(g)
        raise GainError(f"{tail} is not an endpoint of edge {label}")

    def walk_gain(self, walk: Sequence[str]) -> int:
        return walk_gain(self, walk)

    def cycle_gain(self, cycle: Cycle) -> int:
        return walk_gain(self, cycle.walk())

    def unbalanced_loops(self) -> Tuple[str, ...]:
        return tuple(e.label for e in self.graph.edges if e.is_loop and self._gains[e.label] != 0)

    def potentials(self, X=None) -> Tuple[Dict[str, int], Tuple[str, ...]]:
        """
        Gains of forest paths from each component root, and the forest used.

        Roots are the first vertex (in graph order) of each component of G[X].
        """
        forest = self.graph.maximal_forest(X)
        mask = self.graph.mask(forest)
        phi: Dict[str, int] = {}
        for verts in self.graph.component_vertices(X):
            root = min(verts, key=self.graph.vertex_position)
            phi[root] = 0
            stack = [root]
            while stack:
                x = stack.pop()
                for i in self.graph.indices(mask):
                    e = self.graph.edges[i]
                    if x in (e.u, e.v):
                        y = e.other(x)
                        if y not in phi:
                            phi[y] = self.group.mul(phi[x], self.oriented(e.label, x))
                            stack.append(y)
        return phi, forest

    def balanced_components(self, X=None) -> int:
        """Number of components of G[X] whose cycles are all balanced."""
        phi, _ = self.potentials(X)
        count = 0
        for comp in self.graph.components(X):
            if all(self._edge_consistent(label, phi) for label in comp):
                count += 1
        return count

    def _edge_consistent(self, label: str, phi: Mapping[str, int]) -> bool:
        e = self.graph.edge(label)
        lhs = self.group.mul(phi[e.u], self._gains[label])
        return lhs == phi[e.v]

    def is_balanced_subgraph(self, X=None) -> bool:
        return len(self.graph.components(X)) == self.balanced_components(X)

    def frame_rank(self, X=None) -> int:
        """|V(X)| minus the number of balanced components of G[X]."""
        mask = self.graph._resolve(X)
        return len(self.graph.vertices_of(mask)) - self.balanced_components(mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gaining):
            return NotImplemented
        same_graph = self.graph.vertices == other.graph.vertices and self.graph.edges == other.graph.edges
        return same_graph and self.group == other.group and self._gains == other._gains

    def __repr__(self) -> str:
        return f"<Gaining over {self.group.label} |V|={len(self.graph.vertices)} |E|={len(self.graph.edges)}>"


def walk_gain(g: Gaining, walk: Sequence[str]) -> int:
    """Ordered product of oriented gains along an alternating vertex/edge walk."""
    if len(walk) % 2 == 0 and walk:
        raise GainError("a walk alternates vertices and edges and ends at a vertex")
    acc = 0
    for k in range(0, len(walk) - 1, 2):
        tail, label, head = walk[k], walk[k + 1], walk[k + 2]
        try:
            e = g.graph.edge(label)
        except Exception as exc:
            raise GainError(f"invalid walk: {exc}") from exc
        if {tail, head} != {e.u, e.v}:
            raise GainError(f"invalid walk: edge {label} does not join {tail} and {head}")
        acc = g.group.mul(acc, g.oriented(label, tail))
    return acc


# ==================== BIASED GRAPHS ====================

@dataclass(frozen=True)
class BiasedGraph:
    graph: Multigraph
    balanced: frozenset  # edge masks of balanced cycles

    def is_balanced(self, cycle: Union[Cycle, int]) -> bool:
        return (cycle.mask if isinstance(cycle, Cycle) else cycle) in self.balanced

    def balanced_cycles(self) -> List[Cycle]:
        return [c for c in self.graph.enumerate_cycles() if c.mask in self.balanced]

    def linear_class_violation(self) -> Optional[Bicycle]:
        """A theta containing exactly two balanced cycles, if any."""
        cycles = self.graph.enumerate_cycles()
        for b in self.graph.enumerate_bicycles():
            if b.kind != THETA:
                continue
            inside = [c for c in cycles if c.mask & ~b.mask == 0 and c.mask in self.balanced]
            if len(inside) == 2:
                return b
        return None


def balanced_cycles(g: Gaining) -> BiasedGraph:
    cycles = g.graph.enumerate_cycles()
    balanced = frozenset(c.mask for c in cycles if g.cycle_gain(c) == 0)
    biased = BiasedGraph(g.graph, balanced)
    bad = biased.linear_class_violation()
    if bad is not None:
        raise GainError(f"balanced cycles do not form a linear class: theta {bad.edges}")
    logger.debug(f"{len(balanced)} of {len(cycles)} cycles balanced")
    return biased


def switch_normalize(g: Gaining, rho: Union[Mapping[str, int], str]) -> Gaining:
    """Switch by ``rho`` (vertex -> element) or, with ``"forest"``, make a maximal forest identity."""
    if isinstance(rho, str):
        if rho != FOREST:
            raise GainError(f"unknown switching request {rho!r}")
        phi, _ = g.potentials()
        rho = {v: g.group.inv(phi[v]) for v in phi}
        for v in g.graph.vertices:
            rho.setdefault(v, 0)
    missing = [v for v in g.graph.vertices if v not in rho]
    if missing:
        raise GainError(f"switching function undefined on {missing}")
    group = g.group
    switched = {}
    for e in g.graph.edges:
        value = g.gain(e.label)
        if not e.is_loop:
            value = group.mul(group.mul(group.inv(rho[e.u]), value), rho[e.v])
        switched[e.label] = value
    return Gaining(g.graph, group, switched)


def frame_matroid(b: BiasedGraph) -> Matroid:
    """Circuits: balanced cycles, and bicycles containing no balanced cycle."""
    graph = b.graph
    check_budget("matroid_max_ground", CONFIG["matroid_max_ground"], len(graph.edges))
    bad = b.linear_class_violation()
    if bad is not None:
        raise GainError(f"not a linear class: theta {bad.edges} has exactly two balanced cycles")
    circuits = list(b.balanced)
    balanced = list(b.balanced)
    for bicycle in graph.enumerate_bicycles():
        if not any(c & ~bicycle.mask == 0 for c in balanced):
            circuits.append(bicycle.mask)
    m = Matroid.from_circuits([e.label for e in graph.edges], circuits, validate=False)
    logger.info(f"frame matroid on {m.size} edges, rank {m.rank()}")
    return m


def gain_frame_matroid(g: Gaining) -> Matroid:
    return frame_matroid(balanced_cycles(g))


# ==================== AMALGAMS ====================

def _shared_edges(a: Gaining, b: Gaining) -> List[str]:
    right = {e.label for e in b.graph.edges}
    return [e.label for e in a.graph.edges if e.label in right]


def graph_amalgam_conditions(a: Gaining, b: Gaining, base: Tuple[str, str]) -> Optional[str]:
    """
    First failing condition for the two sides to amalgamate, or None.

    Tags: ``vertices`` (intersection is not the base), ``group``, ``i`` (shared
    subgraphs differ), ``ii`` (gains disagree), ``iii`` (no unbalanced shared
    loops at both base vertices), ``iv`` (equal u-v path gains without a
    matching shared link).
    """
    u, v = base
    if set(a.graph.vertices) & set(b.graph.vertices) != {u, v} or u == v:
        return "vertices"
    if a.group != b.group:
        return "group"
    shared = _shared_edges(a, b)
    for label in shared:
        ea, eb = a.graph.edge(label), b.graph.edge(label)
        if {ea.u, ea.v} != {eb.u, eb.v}:
            return "i"
    for label in shared:
        if a.oriented(label, a.graph.edge(label).u) != b.oriented(label, a.graph.edge(label).u):
            return "ii"
    loops_at = {
        a.graph.edge(label).u for label in shared if a.graph.edge(label).is_loop and a.gain(label) != 0
    }
    if not {u, v} <= loops_at:
        return "iii"
    link_gains = {
        a.oriented(label, u) for label in shared if not a.graph.edge(label).is_loop
    }
    left = {a.walk_gain(w) for w in a.graph.path_walks(u, v)}
    right = {b.walk_gain(w) for w in b.graph.path_walks(u, v)}
    if not (left & right) <= link_gains:
        return "iv"
    return None


def gain_graph_amalgam(a: Gaining, b: Gaining, base: Tuple[str, str]) -> Gaining:
    """Union gain graph; vertices and edges of ``a`` first, then the rest of ``b``."""
    u, v = base
    if set(a.graph.vertices) & set(b.graph.vertices) != {u, v} or u == v:
        raise GainError(f"the two graphs must share exactly the vertices {u}, {v}")
    if a.group != b.group:
        raise GainError("the two gainings use different groups")
    shared = _shared_edges(a, b)
    for label in shared:
        ea, eb = a.graph.edge(label), b.graph.edge(label)
        if {ea.u, ea.v} != {eb.u, eb.v}:
            raise GainError(f"shared edge {label} has different ends in the two graphs")
        if a.oriented(label, ea.u) != b.oriented(label, ea.u):
            raise GainError(f"shared edge {label} has different gains in the two graphs")
    seen = set(a.graph.vertices)
    vertices = list(a.graph.vertices) + [x for x in b.graph.vertices if x not in seen]
    shared_set = set(shared)
    edges = list(a.graph.edges) + [e for e in b.graph.edges if e.label not in shared_set]
    gains = a.gains
    gains.update({label: g for label, g in b.gains.items() if label not in shared_set})
    graph = Multigraph(vertices, edges, max_edges=max(a.graph.max_edges, b.graph.max_edges))
    return Gaining(graph, a.group, gains)


def amalgam_recovery_hypotheses(g: Gaining) -> Optional[str]:
    """
    Check the hypotheses that let a graph be recovered from an amalgam of frame matroids.

    Returns a description of the first failure, or None when no loop is
    balanced, every vertex carries an unbalanced loop, and every vertex has
    two distinct neighbours joined to it by unbalanced 2-edge cycles.
    """
    graph = g.graph
    for e in graph.edges:
        if e.is_loop and g.gain(e.label) == 0:
            return f"balanced loop {e.label}"
    with_loop = {graph.edge(label).u for label in g.unbalanced_loops()}
    for x in graph.vertices:
        if x not in with_loop:
            return f"vertex {x} has no unbalanced loop"
    neighbours: Dict[str, Set[str]] = {x: set() for x in graph.vertices}
    links = [e for e in graph.edges if not e.is_loop]
    for i, e in enumerate(links):
        for f in links[i + 1:]:
            if {e.u, e.v} == {f.u, f.v}:
                walk = [e.u, e.label, e.v, f.label, e.u]
                if walk_gain(g, walk) != 0:
                    neighbours[e.u].add(e.v)
                    neighbours[e.v].add(e.u)
    for x in graph.vertices:
        if len(neighbours[x]) < 2:
            return f"vertex {x} has fewer than two unbalanced 2-cycle neighbours"
    return None
