"""
The Λ gadget family for subgroups Γ1 ≤ Γ2 of an ambient group.

Edge labels carry the element index of their gain (A_0 is the identity
edge of the A row). A tick suffix renames everything except the shared base
(the C row, Q8, Q9, D10 and the delta vertices) so two copies can be glued.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from src.backend.algebra.groups import FiniteGroup
from src.backend.errors import GadgetError
from src.backend.gadgets.base import (
    DaggerParams,
    DesignatedCycle,
    Gadget,
    complete_layer,
    dagger_violation,
    designated,
    make_gaining,
)
from src.backend.graphs.multigraph import Edge

logger = logging.getLogger(__name__)

FAMILY = "lambda"
BASE_VERTICES = ("delta1", "delta2")

_D_PAIRS = [
    ("beta1", "alpha1"), ("alpha1", "alpha2"), ("alpha2", "beta2"), ("beta1", "gamma1"),
    ("gamma1", "gamma2"), ("gamma2", "gamma3"), ("gamma1", "gamma3"), ("gamma3", "beta2"),
    ("beta1", "delta1"), ("delta1", "delta2"), ("delta2", "beta2"),
]
_LOOPS = ["alpha1", "alpha2", "gamma2", "beta1", "beta2", "gamma1", "gamma3", "delta1", "delta2"]
_SHARED_D = 10
_SHARED_Q = (8, 9)


@dataclass
class LambdaParts:
    vertices: List[str]
    star: List[Tuple[Edge, int]]
    d_edges: List[Edge]
    q_edges: List[Edge]
    collections: Dict[str, Tuple[str, ...]]
    tick: str

    def base_layer(self) -> Tuple[List[str], List[str]]:
        """D and Q labels that belong to the shared base."""
        return [f"D{_SHARED_D}_1", f"D{_SHARED_D}_2"], [f"Q{i}" for i in _SHARED_Q]

    def own_layer(self) -> Tuple[List[str], List[str]]:
        shared_d, shared_q = self.base_layer()
        return (
            [e.label for e in self.d_edges if e.label not in shared_d],
            [e.label for e in self.q_edges if e.label not in shared_q],
        )

    @property
    def base_edges(self) -> Tuple[str, ...]:
        shared_d, shared_q = self.base_layer()
        return self.collections["C"] + tuple(shared_q) + tuple(shared_d)


def _named(v: str, tick: str) -> str:
    return v if v in BASE_VERTICES else v + tick


def _check_params(ambient: FiniteGroup, gamma1: Sequence[int], gamma2: Sequence[int], M: int) -> None:
    if not ambient.is_subgroup(gamma1):
        raise GadgetError(f"Gamma1 {sorted(gamma1)} is not a subgroup of {ambient.label}")
    if not ambient.is_subgroup(gamma2):
        raise GadgetError(f"Gamma2 {sorted(gamma2)} is not a subgroup of {ambient.label}")
    if not set(gamma1) <= set(gamma2):
        raise GadgetError("Gamma1 must be contained in Gamma2")
    if not 0 <= M < ambient.order:
        raise GadgetError(f"{M} is not an element of {ambient.label}")
    if M in set(gamma2):
        raise GadgetError(f"M={ambient.names[M]} lies in Gamma2")


def lambda_parts(gamma1: Sequence[int], gamma2: Sequence[int], M: int, tick: str = "") -> LambdaParts:
    gamma1, gamma2 = sorted(set(gamma1)), sorted(set(gamma2))
    v = lambda name: _named(name, tick)  # noqa: E731
    e = lambda label: label + tick  # noqa: E731
    vertices = [v(x) for x in ("alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "delta1", "delta2")]

    rows = {
        "A": [(Edge(e(f"A_{g}"), v("alpha1"), v("alpha2")), g) for g in gamma1],
        "B1": [(Edge(e(f"B1_{g}"), v("gamma2"), v("gamma1")), g) for g in gamma2],
        "B2": [(Edge(e(f"B2_{g}"), v("gamma3"), v("gamma2")), g) for g in gamma2],
        "B3": [(Edge(e(f"B3_{g}"), v("gamma1"), v("gamma3")), g) for g in gamma2],
        "C": [(Edge(f"C_{g}", "delta1", "delta2"), g) for g in gamma1],
    }
    k_edges = [(Edge(e("K1"), v("beta1"), v("alpha1")), M), (Edge(e("K2"), v("beta1"), v("gamma1")), M)]
    ends = [("beta1", "alpha1"), ("alpha2", "beta2"), ("gamma3", "beta2"), ("beta1", "delta1"), ("delta2", "beta2")]
    t_edges = [(Edge(e(f"T{i}"), v(a), v(b)), 0) for i, (a, b) in enumerate(ends, start=1)]
    star = [pair for row in rows.values() for pair in row] + k_edges + t_edges

    d_edges = []
    for i, (a, b) in enumerate(_D_PAIRS, start=1):
        mark = "" if i == _SHARED_D else tick
        d_edges += [Edge(f"D{i}_{j}{mark}", v(a), v(b)) for j in (1, 2)]
    q_edges = [Edge(f"Q{i}" + ("" if i in _SHARED_Q else tick), v(x), v(x)) for i, x in enumerate(_LOOPS, start=1)]

    collections = {name: tuple(edge.label for edge, _ in row) for name, row in rows.items()}
    collections["K"] = (e("K1"), e("K2"))
    collections["T"] = tuple(row[0][0].label for row in rows.values()) + tuple(edge.label for edge, _ in t_edges)
    for i in range(1, len(_D_PAIRS) + 1):
        collections[f"D{i}"] = (d_edges[2 * i - 2].label, d_edges[2 * i - 1].label)
    collections["Q"] = tuple(edge.label for edge in q_edges)
    return LambdaParts(vertices, star, d_edges, q_edges, collections, tick)


def assemble_lambda(
    ambient: FiniteGroup,
    parts: LambdaParts,
    gains: Dict[str, int],
    layer: Tuple[List[str], List[str]],
    elements: Dict[str, Tuple[int, ...]],
    star_only: bool,
) -> Gadget:
    """Gadget from precomputed gains; ``layer`` lists the D and Q labels kept on top of the star."""
    d_keep, q_keep = set(layer[0]), set(layer[1])
    edges = [edge for edge, _ in parts.star]
    edges += [edge for edge in parts.d_edges if edge.label in d_keep]
    edges += [edge for edge in parts.q_edges if edge.label in q_keep]
    gaining = make_gaining(parts.vertices, edges, ambient, {edge.label: gains[edge.label] for edge in edges})
    kept = tuple(label for label in layer[0] + layer[1])
    bad = dagger_violation(gaining, kept)
    if bad is not None:
        raise GadgetError(f"edge {bad[0]} lies on the balanced cycle {' '.join(bad[1])}")
    present = {edge.label for edge in edges}
    collections = {}
    for name, labels in parts.collections.items():
        labels = tuple(x for x in labels if x in present)
        if labels:
            collections[name] = labels
    base = tuple(x for x in parts.base_edges if x in present)
    return Gadget(
        FAMILY, gaining, collections, dict(elements), {}, base, BASE_VERTICES,
        star_only=star_only, layer_edges=kept, tick=parts.tick,
    )


def build_lambda_gadget(
    ambient: FiniteGroup,
    gamma1: Sequence[int],
    gamma2: Sequence[int],
    M: int,
    d_values: Optional[Sequence[int]] = None,
    q_values: Optional[Sequence[int]] = None,
    star_only: bool = False,
    tick: str = "",
) -> Gadget:
    """
    Build the Λ gadget for Γ1 ≤ Γ2 ≤ ambient with K gain M outside Γ2.

    d_values cover D1_1, D1_2, ..., D11_2 and q_values Q1..Q9; missing values
    are chosen greedily. star_only leaves out every D pair and Q loop.
    """
    gamma1 = [int(g) for g in gamma1]
    gamma2 = [int(g) for g in gamma2]
    _check_params(ambient, gamma1, gamma2, M)
    parts = lambda_parts(gamma1, gamma2, M, tick)
    star_gains = {edge.label: g for edge, g in parts.star}
    elements = {"Gamma1": tuple(sorted(set(gamma1))), "Gamma2": tuple(sorted(set(gamma2))), "M": (M,)}
    if star_only:
        gadget = assemble_lambda(ambient, parts, star_gains, ([], []), elements, True)
        logger.info(f"built Λ* gadget over {ambient.label}: {len(gadget.graph.edges)} edges")
        return gadget

    edges = [edge for edge, _ in parts.star] + parts.d_edges + parts.q_edges
    d_labels = [edge.label for edge in parts.d_edges]
    q_labels = [edge.label for edge in parts.q_edges]
    gains = complete_layer(edges, star_gains, ambient, d_labels, q_labels, d_values, q_values)
    elements["d"] = tuple(gains[x] for x in d_labels)
    elements["q"] = tuple(gains[x] for x in q_labels)
    gadget = assemble_lambda(ambient, parts, gains, (d_labels, q_labels), elements, False)
    logger.info(f"built Λ gadget over {ambient.label}: {len(edges)} edges, |Gamma1|={len(elements['Gamma1'])}, |Gamma2|={len(elements['Gamma2'])}")
    return gadget


def find_lambda_params(
    ambient: FiniteGroup,
    gamma1: Sequence[int],
    gamma2: Sequence[int],
    star_only: bool = False,
) -> Optional[DaggerParams]:
    """Least-index M outside Γ2, then greedy D/Q values; None when none exist."""
    outside = set(gamma2)
    M = next((g for g in range(ambient.order) if g not in outside), None)
    if M is None:
        logger.info(f"Gamma2 is all of {ambient.label}: no M outside it")
        return None
    if star_only:
        return DaggerParams(M)
    try:
        gadget = build_lambda_gadget(ambient, gamma1, gamma2, M)
    except GadgetError as exc:
        logger.info(f"no D/Q layer over {ambient.label}: {exc}")
        return None
    return DaggerParams(M, None, gadget.elements["d"], gadget.elements["q"])


def _require(g: Gadget) -> None:
    if g.family != FAMILY:
        raise GadgetError(f"expected a Λ gadget, got family {g.family!r}")


def designated_lambda_cycles(g: Gadget) -> List[DesignatedCycle]:
    """Matching cycle through A_g, B3_g and the K pair, and the A/C transfer cycle, for each g in Γ1."""
    _require(g)
    tick = g.tick
    v = lambda name: _named(name, tick)  # noqa: E731
    out = []
    for x in g.elements["Gamma1"]:
        matching = [
            v("alpha1"), f"A_{x}{tick}", v("alpha2"), f"T2{tick}", v("beta2"), f"T3{tick}", v("gamma3"),
            f"B3_{x}{tick}", v("gamma1"), f"K2{tick}", v("beta1"), f"K1{tick}", v("alpha1"),
        ]
        out.append(designated(g, f"matching-{x}", matching))
    for x in g.elements["Gamma1"]:
        transfer = [
            v("beta1"), f"T1{tick}", v("alpha1"), f"A_{x}{tick}", v("alpha2"), f"T2{tick}", v("beta2"),
            f"T5{tick}", "delta2", f"C_{x}", "delta1", f"T4{tick}", v("beta1"),
        ]
        out.append(designated(g, f"transfer-{x}", transfer))
    return out
