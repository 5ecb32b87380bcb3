"""
F-conviviality graphs of a finite ambient group H.

Vertices are classes of pairs (Γ, ψ) with Γ embeddable in H and ψ: F -> Γ
injective, two pairs being equivalent when an isomorphism carries one ψ to
the other. Only subgroups of H are enumerated for Γ, one per isomorphism
type, which covers every finite Γ that embeds in H.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.backend.algebra.groups import (
    FiniteGroup,
    Monomorphism,
    are_isomorphic,
    automorphisms,
    enumerate_monomorphisms,
    minimal_generators,
)
from src.backend.config_loader import CONFIG
from src.backend.errors import check_budget
from src.backend.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

FINITE_NOTE = "finite restriction: Gamma ranges over subgroups of H up to isomorphism"


@dataclass(frozen=True)
class ConvivialVertex:
    group: FiniteGroup
    members: Tuple[int, ...]  # Γ as elements of H
    psi: Monomorphism

    def signature(self, F: FiniteGroup) -> str:
        images = ",".join(f"{F.names[g]}->{self.group.names[self.psi(g)]}" for g in minimal_generators(F))
        return f"({self.group.order}, {images or 'trivial'})"


@dataclass
class ConvivialityGraph:
    """Symmetric adjacency over vertex classes; ``cells`` maps quotient vertices to the classes they merge."""

    ambient: FiniteGroup
    F: FiniteGroup
    vertices: List[ConvivialVertex]
    adjacency: np.ndarray
    cells: List[List[int]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def labels(self) -> List[str]:
        return [v.signature(self.F) for v in self.vertices]

    def edge_count(self) -> int:
        """Edges between distinct vertices."""
        return int((self.adjacency.sum() - np.trace(self.adjacency)) // 2)

    def to_frame(self) -> pd.DataFrame:
        labels = self.labels()
        return pd.DataFrame(self.adjacency.astype(int), index=labels, columns=labels)

    def to_dot(self, name: str = "conviviality") -> str:
        lines = [f"// {FINITE_NOTE}", f"// ambient {self.ambient.label}, F = {self.F.label}", f"graph {name} {{"]
        for i, label in enumerate(self.labels()):
            lines.append(f'  v{i} [label="{label}"];')
        for i in range(self.size):
            for j in range(i, self.size):
                if self.adjacency[i, j]:
                    lines.append(f"  v{i} -- v{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _subgroup_types(H: FiniteGroup) -> List[Tuple[FiniteGroup, Tuple[int, ...]]]:
    """One subgroup per isomorphism type, smallest first, earliest element tuple within a size."""
    kept: List[Tuple[FiniteGroup, Tuple[int, ...]]] = []
    for members in H.all_subgroups():
        sub, embedding = H.subgroup_table(members)
        if any(are_isomorphic(sub, other) for other, _ in kept):
            continue
        kept.append((sub, embedding))
    return kept


def _classes(gamma: FiniteGroup, F: FiniteGroup) -> List[Monomorphism]:
    """Least map of each Aut(Γ)-orbit of monomorphisms F -> Γ."""
    monos = enumerate_monomorphisms(F, gamma)
    if not monos:
        return []
    auts = automorphisms(gamma)
    seen = set()
    reps = []
    for psi in monos:
        if psi.map in seen:
            continue
        reps.append(psi)
        seen.update(psi.compose(theta).map for theta in auts)
    return reps


def convivial_vertices(H: FiniteGroup, F: FiniteGroup) -> List[ConvivialVertex]:
    check_budget("conviviality_max_order", CONFIG["conviviality_max_order"], H.order)
    vertices = []
    for sub, members in _subgroup_types(H):
        for psi in _classes(sub, F):
            vertices.append(ConvivialVertex(sub, members, psi))
    logger.debug(f"{len(vertices)} vertex classes for F={F.label} in {H.label}")
    return vertices


def _images(H: FiniteGroup, v: ConvivialVertex) -> Dict[Tuple[int, ...], Monomorphism]:
    """θ∘ψ as a map F -> H for every monomorphism θ: Γ -> H, keeping the first θ per map."""
    out: Dict[Tuple[int, ...], Monomorphism] = {}
    for theta in enumerate_monomorphisms(v.group, H):
        out.setdefault(v.psi.compose(theta).map, theta)
    return out


def convivial(
    H: FiniteGroup,
    F: FiniteGroup,
    v1: ConvivialVertex,
    v2: ConvivialVertex,
) -> Optional[Tuple[Monomorphism, Monomorphism]]:
    """(θ1, θ2) into H with θ1∘ψ1 = θ2∘ψ2, least θ1 first; None when the pair is not convivial."""
    right = _images(H, v2)
    for theta1 in enumerate_monomorphisms(v1.group, H):
        key = v1.psi.compose(theta1).map
        if key in right:
            return theta1, right[key]
    return None


def elementary_conviviality_graph(H: FiniteGroup, F: FiniteGroup, threads: Optional[int] = None) -> ConvivialityGraph:
    vertices = convivial_vertices(H, F)
    images: List[FrozenSet[Tuple[int, ...]]] = ordered_map(lambda v: frozenset(_images(H, v)), vertices, threads)
    n = len(vertices)
    adjacency = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i, n):
            adjacency[i, j] = adjacency[j, i] = bool(images[i] & images[j])
    graph = ConvivialityGraph(H, F, vertices, adjacency, [[i] for i in range(n)])
    logger.info(f"elementary conviviality graph of {H.label} over {F.label}: {n} vertices, {graph.edge_count()} edges")
    return graph


def quotient_conviviality_graph(g: ConvivialityGraph) -> ConvivialityGraph:
    """Merge vertices with identical adjacency rows, keeping the first vertex of each cell."""
    rows: Dict[bytes, int] = {}
    cells: List[List[int]] = []
    for i in range(g.size):
        key = g.adjacency[i].tobytes()
        if key not in rows:
            rows[key] = len(cells)
            cells.append([])
        cells[rows[key]].append(i)
    reps = [cell[0] for cell in cells]
    merged = [[m for i in cell for m in g.cells[i]] for cell in cells] if g.cells else cells
    quotient = ConvivialityGraph(
        g.ambient, g.F, [g.vertices[i] for i in reps], g.adjacency[np.ix_(reps, reps)].copy(), merged
    )
    logger.info(f"quotient conviviality graph: {g.size} -> {quotient.size} vertices")
    return quotient
