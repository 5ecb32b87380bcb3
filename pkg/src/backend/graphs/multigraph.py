"""
Undirected multigraphs with loops and parallel edges.

Edge subsets are passed around as integer masks over the declared edge order
(bit i is the i-th edge). Cycle and bicycle listings are canonical: sorted by
size, then by the positions of their edges.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from src.backend.config_loader import CONFIG
from src.backend.errors import BudgetExceeded, GraphError, check_budget

logger = logging.getLogger(__name__)

THETA = "theta"
TIGHT_HANDCUFF = "tight-handcuff"
LOOSE_HANDCUFF = "loose-handcuff"


@dataclass(frozen=True)
class Edge:
    label: str
    u: str
    v: str

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, x: str) -> str:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise GraphError(f"vertex {x} is not incident with edge {self.label}")


@dataclass(frozen=True)
class Cycle:
    """A cycle with one fixed traversal: (vertex, edge leaving it) pairs."""

    mask: int
    edges: Tuple[str, ...]
    traversal: Tuple[Tuple[str, str], ...]

    @property
    def vertices(self) -> frozenset:
        return frozenset(v for v, _ in self.traversal)

    def __len__(self) -> int:
        return len(self.edges)

    def walk(self) -> List[str]:
        """Closed walk v0, e0, v1, ..., e_{k-1}, v0."""
        out: List[str] = []
        for v, e in self.traversal:
            out.extend((v, e))
        out.append(self.traversal[0][0])
        return out


@dataclass(frozen=True)
class Bicycle:
    mask: int
    edges: Tuple[str, ...]
    kind: str
    cycles: Tuple[Cycle, Cycle]


EdgeSpec = Union[Edge, Tuple[str, str, str]]


class Multigraph:
    """
    Labelled multigraph.

    Args:
        vertices: vertex labels in display order
        edges: Edge values or (label, u, v) triples; u == v is a loop
        max_edges: enumeration cap on the number of edges handled at once
    """

    def __init__(self, vertices: Sequence[str], edges: Iterable[EdgeSpec], max_edges: Optional[int] = None):
        self.vertices: Tuple[str, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("vertex labels must be unique")
        self._vertex_pos = {v: i for i, v in enumerate(self.vertices)}
        built = []
        for spec in edges:
            edge = spec if isinstance(spec, Edge) else Edge(*spec)
            for end in (edge.u, edge.v):
                if end not in self._vertex_pos:
                    raise GraphError(f"edge {edge.label} uses undeclared vertex {end}")
            built.append(edge)
        self.edges: Tuple[Edge, ...] = tuple(built)
        self._edge_pos = {e.label: i for i, e in enumerate(self.edges)}
        if len(self._edge_pos) != len(self.edges):
            raise GraphError("edge labels must be unique")
        self.max_edges = CONFIG["graph_max_edges"] if max_edges is None else max_edges
        self._cycle_cache: Dict[int, List[Cycle]] = {}

    # ---- addressing ----

    @property
    def full_mask(self) -> int:
        return (1 << len(self.edges)) - 1

    def edge(self, label: str) -> Edge:
        return self.edges[self.edge_index(label)]

    def edge_index(self, label: str) -> int:
        try:
            return self._edge_pos[label]
        except KeyError:
            raise GraphError(f"unknown edge label {label!r}") from None

    def vertex_position(self, v: str) -> int:
        return self._vertex_pos[v]

    def mask(self, labels: Iterable[str]) -> int:
        out = 0
        for label in labels:
            out |= 1 << self.edge_index(label)
        return out

    def indices(self, mask: int) -> List[int]:
        return [i for i in range(len(self.edges)) if mask >> i & 1]

    def labels(self, mask: int) -> Tuple[str, ...]:
        return tuple(self.edges[i].label for i in self.indices(mask))

    def vertices_of(self, mask: int) -> frozenset:
        return frozenset(end for i in self.indices(mask) for end in (self.edges[i].u, self.edges[i].v))

    def degrees(self, mask: int) -> Counter:
        deg: Counter = Counter()
        for i in self.indices(mask):
            e = self.edges[i]
            deg[e.u] += 1
            deg[e.v] += 1
        return deg

    def _resolve(self, X) -> int:
        if X is None:
            return self.full_mask
        if isinstance(X, int):
            return X
        return self.mask(X)

    def nx_graph(self, mask: Optional[int] = None, loops: bool = True, all_vertices: bool = True) -> nx.MultiGraph:
        """networkx view keyed by edge label; edge attribute ``order`` is the edge position."""
        G = nx.MultiGraph()
        if all_vertices:
            G.add_nodes_from(self.vertices)
        for i in self.indices(self.full_mask if mask is None else mask):
            e = self.edges[i]
            if loops or not e.is_loop:
                G.add_edge(e.u, e.v, key=e.label, order=i)
        return G

    # ---- subgraphs ----

    def induced_subgraph(self, X) -> "Multigraph":
        """G[X]: edges X and exactly the vertices incident with them."""
        mask = self._resolve(X)
        touched = self.vertices_of(mask)
        return Multigraph(
            [v for v in self.vertices if v in touched],
            [self.edges[i] for i in self.indices(mask)],
            max_edges=self.max_edges,
        )

    def components(self, X=None) -> List[Tuple[str, ...]]:
        """Edge sets of the connected components of G[X], ordered by first edge."""
        mask = self._resolve(X)
        G = self.nx_graph(mask, all_vertices=False)
        comps = []
        for verts in nx.connected_components(G):
            comp_mask = 0
            for i in self.indices(mask):
                if self.edges[i].u in verts:
                    comp_mask |= 1 << i
            comps.append(comp_mask)
        comps.sort(key=lambda m: (m & -m).bit_length())
        return [self.labels(m) for m in comps]

    def component_count(self, X=None) -> int:
        return len(self.components(X))

    def component_vertices(self, X=None) -> List[frozenset]:
        """Vertex sets of the components of G[X]."""
        return [self.vertices_of(self.mask(c)) for c in self.components(X)]

    def maximal_forest(self, X=None) -> Tuple[str, ...]:
        """Spanning forest of G[X], preferring earlier edges."""
        mask = self._resolve(X)
        G = self.nx_graph(mask, loops=False, all_vertices=False)
        chosen = nx.minimum_spanning_edges(G, algorithm="kruskal", weight="order", keys=True, data=False)
        return self.labels(self.mask(k for _, _, k in chosen))

    def paths(self, u: str, v: str, X=None) -> List[Tuple[str, ...]]:
        """All simple paths from u to v inside X, as edge-label tuples."""
        return [tuple(w[1::2]) for w in self.path_walks(u, v, X)]

    def path_walks(self, u: str, v: str, X=None) -> List[List[str]]:
        """All simple u-v paths inside X as alternating vertex/edge walks, sorted by edge positions."""
        if u == v:
            return [[u]]
        mask = self._resolve(X)
        G = self.nx_graph(mask, loops=False)
        walks = [self._walk_from(u, [k for _, _, k in path]) for path in nx.all_simple_edge_paths(G, u, v)]
        walks.sort(key=lambda w: [self._edge_pos[e] for e in w[1::2]])
        return walks

    def _walk_from(self, start: str, labels: Sequence[str]) -> List[str]:
        walk = [start]
        here = start
        for label in labels:
            here = self.edge(label).other(here)
            walk.extend((label, here))
        return walk

    # ---- cycles ----

    def _check_size(self, mask: int) -> None:
        check_budget("graph_max_edges", self.max_edges, bin(mask).count("1"))

    def _cycle_from(self, pairs: List[Tuple[str, int]]) -> Cycle:
        n = len(pairs)
        s = min(range(n), key=lambda k: self._vertex_pos[pairs[k][0]])
        forward = [pairs[(s + k) % n] for k in range(n)]
        backward = [(pairs[(s - k) % n][0], pairs[(s - k - 1) % n][1]) for k in range(n)]
        chosen = forward if forward[0][1] <= backward[0][1] else backward
        mask = 0
        for _, i in pairs:
            mask |= 1 << i
        return Cycle(mask, self.labels(mask), tuple((v, self.edges[i].label) for v, i in chosen))

    def enumerate_cycles(self, X=None, cap: Optional[int] = None) -> List[Cycle]:
        """Every cycle of G[X] once: loops, parallel pairs and longer cycles."""
        mask = self._resolve(X)
        self._check_size(mask)
        cap = CONFIG["cycle_cap"] if cap is None else cap
        if mask in self._cycle_cache:
            cached = self._cycle_cache[mask]
            if len(cached) > cap:
                raise BudgetExceeded("cycle_cap", cap, len(cached))
            return cached
        cycles: List[Cycle] = []
        for i in self.indices(mask):
            e = self.edges[i]
            if e.is_loop:
                cycles.append(self._cycle_from([(e.u, i)]))
            else:
                later = mask & ~((1 << (i + 1)) - 1)
                G = self.nx_graph(later, loops=False)
                for path in nx.all_simple_edge_paths(G, e.v, e.u):
                    walk = self._walk_from(e.v, [k for _, _, k in path])
                    pairs = [(e.u, i)] + [(walk[2 * j], self._edge_pos[walk[2 * j + 1]]) for j in range(len(path))]
                    cycles.append(self._cycle_from(pairs))
            if len(cycles) > cap:
                raise BudgetExceeded("cycle_cap", cap, len(cycles))
        cycles.sort(key=lambda c: (len(c), self.indices(c.mask)))
        logger.debug(f"{len(cycles)} cycles on {bin(mask).count('1')} edges")
        self._cycle_cache[mask] = cycles
        return cycles

    def is_cycle(self, X) -> bool:
        """Connected with every vertex of degree 2."""
        mask = self._resolve(X)
        if mask == 0:
            return False
        return set(self.degrees(mask).values()) == {2} and len(self.components(mask)) == 1

    def enumerate_bicycles(self, X=None, cap: Optional[int] = None) -> List[Bicycle]:
        """Every theta and handcuff of G[X], each edge set once."""
        mask = self._resolve(X)
        self._check_size(mask)
        cap = CONFIG["cycle_cap"] if cap is None else cap
        cycles = self.enumerate_cycles(mask, cap)
        found = set()
        for a, b in itertools.combinations(cycles, 2):
            union = a.mask | b.mask
            if union in found:
                continue
            if a.vertices & b.vertices:
                if bin(union).count("1") == len(a.vertices | b.vertices) + 1:
                    found.add(union)
            else:
                for path_mask in self._connecting_paths(a, b, mask):
                    found.add(union | path_mask)
            if len(found) > cap:
                raise BudgetExceeded("cycle_cap", cap, len(found))
        bicycles = [self._classify_bicycle(m, cycles) for m in found]
        bicycles.sort(key=lambda c: (len(c.edges), self.indices(c.mask)))
        return bicycles

    def _connecting_paths(self, a: Cycle, b: Cycle, mask: int) -> List[int]:
        rest = mask & ~(a.mask | b.mask)
        G = self.nx_graph(rest, loops=False)
        blocked = a.vertices | b.vertices
        out = []
        for x in sorted(a.vertices, key=self._vertex_pos.get):
            for y in sorted(b.vertices, key=self._vertex_pos.get):
                H = G.subgraph([v for v in G.nodes if v not in blocked or v in (x, y)])
                for path in nx.all_simple_edge_paths(H, x, y):
                    out.append(self.mask(k for _, _, k in path))
        return out

    def _classify_bicycle(self, mask: int, cycles: List[Cycle]) -> Bicycle:
        inside = [c for c in cycles if c.mask & ~mask == 0]
        if 4 in self.degrees(mask).values():
            kind = TIGHT_HANDCUFF
        elif len(inside) == 3:
            kind = THETA
        else:
            kind = LOOSE_HANDCUFF
        return Bicycle(mask, self.labels(mask), kind, (inside[0], inside[1]))

    def __repr__(self) -> str:
        return f"<Multigraph |V|={len(self.vertices)} |E|={len(self.edges)}>"
