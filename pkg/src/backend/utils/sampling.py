"""
Seeded random instances for the property checks.

Every sampler takes a ``random.Random`` so sweeps and tests are reproducible
without touching global RNG state.
"""

import random
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.backend.algebra.groups import FiniteGroup, cyclic, symmetric
from src.backend.coloured.systems import ColouredComplement, ColouredSystem
from src.backend.errors import FormulaError
from src.backend.graphs.gain import Gaining
from src.backend.graphs.multigraph import Multigraph
from src.backend.logic.formula import And, Count, Exists, Formula, Hyp, Not, Subset
from src.backend.matroids.matroid import Matroid, linear_matroid

SMALL_GROUPS = ("cyclic2", "cyclic3", "cyclic4", "cyclic5", "cyclic6", "symmetric3")


def small_group(rng: random.Random) -> FiniteGroup:
    name = rng.choice(SMALL_GROUPS)
    return symmetric(3) if name == "symmetric3" else cyclic(int(name[len("cyclic"):]))


# ==================== FORMULAS ====================

def _atom(rng: random.Random, variables: int, delta: int) -> Formula:
    i = rng.randint(1, variables)
    kind = rng.choice(("hyp", "subset", "count") if delta >= 2 else ("hyp", "subset"))
    if kind == "hyp":
        return Hyp(i)
    if kind == "subset":
        return Subset(i, rng.randint(1, variables))
    q = rng.randint(2, delta)
    return Count(i, rng.randrange(q), q)


def _grow(rng: random.Random, nodes: int, variables: int, delta: int) -> Formula:
    if nodes <= 1:
        return _atom(rng, variables, delta)
    kind = rng.choice(("not", "and", "exists") if nodes >= 3 else ("not", "exists"))
    if kind == "not":
        return Not(_grow(rng, nodes - 1, variables, delta))
    if kind == "exists":
        child = _grow(rng, nodes - 1, variables, delta)
        if not child.free:
            return Not(child)
        return Exists(rng.choice(sorted(child.free)), child)
    split = rng.randint(1, nodes - 2)
    return And(_grow(rng, split, variables, delta), _grow(rng, nodes - 1 - split, variables, delta))


def random_formula(rng: random.Random, max_nodes: int = 5, variables: int = 2, delta: int = 2, attempts: int = 100) -> Formula:
    """Formula with at most ``max_nodes`` nodes over Z1..Z{variables}, confined to ``delta``."""
    for _ in range(attempts):
        try:
            return _grow(rng, rng.randint(1, max_nodes), variables, delta)
        except FormulaError:
            continue  # conjunction clash, draw again
    return Hyp(1)


# ==================== COLOURED SYSTEMS ====================

def random_system(rng: random.Random, ground: Sequence[str], colours: Sequence[str]) -> ColouredSystem:
    table = [rng.randrange(len(colours)) for _ in range(1 << len(ground))]
    return ColouredSystem(ground, colours, table)


def random_complement(rng: random.Random, ground: Sequence[str], colours: Sequence[str]) -> ColouredComplement:
    table = np.array([[rng.random() < 0.5 for _ in colours] for _ in range(1 << len(ground))], dtype=bool)
    return ColouredComplement(ground, colours, table)


def random_assignment(rng: random.Random, variables: Sequence[int], size: int) -> Dict[int, int]:
    return {i: rng.randrange(1 << size) for i in variables}


# ==================== GAIN GRAPHS ====================

def random_gaining(rng: random.Random, max_vertices: int = 5, max_edges: int = 8, group: FiniteGroup = None) -> Gaining:
    """Multigraph with loops and parallel edges, gains uniform over a small group."""
    group = group or small_group(rng)
    vertices = [f"v{i}" for i in range(1, rng.randint(1, max_vertices) + 1)]
    edges: List[Tuple[str, str, str]] = []
    for k in range(1, rng.randint(1, max_edges) + 1):
        edges.append((f"e{k}", rng.choice(vertices), rng.choice(vertices)))
    graph = Multigraph(vertices, edges)
    gains = {label: rng.randrange(group.order) for label, _, _ in edges}
    return Gaining(graph, group, gains)


def random_switching(rng: random.Random, g: Gaining) -> Dict[str, int]:
    return {v: rng.randrange(g.group.order) for v in g.graph.vertices}


def random_gain_amalgam_pair(rng: random.Random, group: FiniteGroup, max_private: int = 4) -> Tuple[Gaining, Gaining]:
    """
    Two gainings meeting in the vertices u, v.

    Both carry the loops lu, lv with the same non-identity gains and, half the
    time, a shared link uv. Private edges join u, v and up to two private
    vertices per side; private loops sit on private vertices only.
    """
    shared = [("lu", "u", "u"), ("lv", "v", "v")]
    shared_gains = {"lu": rng.randrange(1, group.order), "lv": rng.randrange(1, group.order)}
    if rng.random() < 0.5:
        shared.append(("uv", "u", "v"))
        shared_gains["uv"] = rng.randrange(group.order)

    def side(prefix: str) -> Gaining:
        own = [f"{prefix}{i}" for i in range(1, rng.randint(1, 2) + 1)]
        vertices = ["u", "v"] + own
        edges = list(shared)
        gains = dict(shared_gains)
        for k in range(1, rng.randint(1, max_private) + 1):
            x, y = rng.choice(vertices), rng.choice(vertices)
            if x == y and x in ("u", "v"):
                y = rng.choice(own)
            label = f"{prefix}e{k}"
            edges.append((label, x, y))
            gains[label] = rng.randrange(group.order)
        return Gaining(Multigraph(vertices, edges), group, gains)

    return side("a"), side("b")


# ==================== AMALGAMS ====================

def random_amalgam_pair(rng: random.Random, p: int = 3, max_side: int = 6) -> Tuple[Matroid, Matroid]:
    """Two GF(p) matroids sharing a rank-2 line of two or three points."""
    line = [("p", (1, 0, 0)), ("q", (0, 1, 0))]
    if rng.random() < 0.5:
        line.append(("r", (1, 1, 0)))

    def side(prefix: str) -> Matroid:
        extra = rng.randint(1, max_side - len(line))
        vectors = [(f"{prefix}{k}", tuple(rng.randrange(p) for _ in range(3))) for k in range(1, extra + 1)]
        return linear_matroid(line + vectors, p)

    return side("a"), side("b")
