"""
Two Λ gadgets glued along their base, with K gains taken from a cyclic
extension of the ambient group so they avoid both B subgroups.

The ambient group H becomes (H x Z_k) x Z_k; the left copy uses
M1 = (e, 1, 0) and the right copy M2 = (e, 0, 1).
"""

import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from src.backend.algebra.groups import FiniteGroup, cyclic, direct_product
from src.backend.errors import GadgetError
from src.backend.gadgets.base import Gadget, complete_layer
from src.backend.gadgets.lambda_family import BASE_VERTICES, assemble_lambda, lambda_parts
from src.backend.graphs.gain import Gaining, gain_graph_amalgam, graph_amalgam_conditions

logger = logging.getLogger(__name__)

EQUAL = "equal"
DIFFERENT = "different"


@dataclass
class DiagonalPair:
    left: Gadget
    right: Gadget
    amalgam: Gaining
    failed_condition: Optional[str]
    comparison: str

    def summary(self) -> str:
        conditions = "conditions hold" if self.failed_condition is None else f"condition {self.failed_condition} fails"
        return f"diagonal pair over {self.amalgam.group.label}: {conditions}, frame amalgam {self.comparison}"


def extended_group(ambient: FiniteGroup, k: int) -> Tuple[FiniteGroup, int, int]:
    """(H x Z_k) x Z_k with the two K gains; H sits inside as the elements h*k*k."""
    if k < 2:
        raise GadgetError(f"the cyclic factor needs order at least 2, got {k}")
    group = direct_product(direct_product(ambient, cyclic(k)), cyclic(k))
    return group, k, 1


def _check_subgroups(ambient: FiniteGroup, gamma0: Sequence[int], h1: Sequence[int], h2: Sequence[int]) -> None:
    for name, members in (("Gamma0", gamma0), ("H1", h1), ("H2", h2)):
        if not ambient.is_subgroup(members):
            raise GadgetError(f"{name} {sorted(members)} is not a subgroup of {ambient.label}")
    if not set(gamma0) <= set(h1) & set(h2):
        raise GadgetError("Gamma0 must lie in both H1 and H2")


def diagonal_pair(
    ambient: FiniteGroup,
    gamma0: Sequence[int],
    h1: Sequence[int],
    h2: Sequence[int],
    k: int = 4,
    star_only: bool = True,
) -> DiagonalPair:
    """
    Glue Λ(Γ0, H1) and Λ(Γ0, H2) along the C row, Q8, Q9 and D10.

    With star_only only the shared base part of the D/Q layer is placed;
    otherwise every D pair and Q loop of both copies is chosen greedily over
    the glued graph. Raises GadgetError when the extended group is too small.
    """
    _check_subgroups(ambient, gamma0, h1, h2)
    group, m1, m2 = extended_group(ambient, k)
    embed = lambda members: sorted(int(h) * k * k for h in members)  # noqa: E731
    g0 = embed(gamma0)
    left_parts = lambda_parts(g0, embed(h1), m1)
    right_parts = lambda_parts(g0, embed(h2), m2, tick="'")

    shared = {edge.label for edge, _ in left_parts.star} & {edge.label for edge, _ in right_parts.star}
    star = [edge for edge, _ in left_parts.star] + [edge for edge, _ in right_parts.star if edge.label not in shared]
    gains = {edge.label: g for edge, g in left_parts.star + right_parts.star}
    base_d, base_q = left_parts.base_layer()
    d_labels, q_labels = list(base_d), list(base_q)
    if not star_only:
        for parts in (left_parts, right_parts):
            own_d, own_q = parts.own_layer()
            d_labels += own_d
            q_labels += own_q
    layer = {label for label in d_labels + q_labels}
    layer_edges = [e for parts in (left_parts, right_parts) for e in parts.d_edges + parts.q_edges if e.label in layer]
    unique = list({e.label: e for e in layer_edges}.values())
    gains = complete_layer(star + unique, gains, group, d_labels, q_labels)

    gadgets = []
    for parts, gamma2, M in ((left_parts, h1, m1), (right_parts, h2, m2)):
        own = ([x for x in d_labels if x in {e.label for e in parts.d_edges}],
               [x for x in q_labels if x in {e.label for e in parts.q_edges}])
        elements = {"Gamma1": tuple(g0), "Gamma2": tuple(embed(gamma2)), "M": (M,)}
        gadgets.append(assemble_lambda(group, parts, gains, own, elements, star_only))
    left, right = gadgets

    amalgam = gain_graph_amalgam(left.gaining, right.gaining, BASE_VERTICES)
    failed = graph_amalgam_conditions(left.gaining, right.gaining, BASE_VERTICES)
    comparison = _compare(left, right, amalgam)
    pair = DiagonalPair(left, right, amalgam, failed, comparison)
    logger.info(pair.summary())
    return pair


def _frame_circuits(g: Gaining) -> List[FrozenSet[str]]:
    """Balanced cycles and the bicycles containing none, as label sets."""
    graph = g.graph
    balanced = [c.mask for c in graph.enumerate_cycles() if g.cycle_gain(c) == 0]
    circuits = list(balanced)
    for bicycle in graph.enumerate_bicycles():
        if not any(c & ~bicycle.mask == 0 for c in balanced):
            circuits.append(bicycle.mask)
    return [frozenset(graph.labels(m)) for m in circuits]


class AmalgamRank:
    """Rank function of the proper amalgam of two frame matroids, read off the two gainings."""

    def __init__(self, left: Gaining, right: Gaining):
        self.left, self.right = left, right
        self.left_edges = frozenset(e.label for e in left.graph.edges)
        self.right_edges = frozenset(e.label for e in right.graph.edges)
        self.shared = tuple(e.label for e in left.graph.edges if e.label in self.right_edges)

    def __call__(self, X: Iterable[str]) -> int:
        X = frozenset(X)
        fixed = X & self.left_edges & self.right_edges
        free = [x for x in self.shared if x not in fixed]
        best = None
        for k in range(len(free) + 1):
            for extra in itertools.combinations(free, k):
                W = fixed.union(extra)
                value = (
                    self.left.frame_rank((X & self.left_edges) | W)
                    + self.right.frame_rank((X & self.right_edges) | W)
                    - self.left.frame_rank(W)
                )
                best = value if best is None else min(best, value)
        return best


def _compare(left: Gadget, right: Gadget, amalgam: Gaining) -> str:
    """
    Frame matroid of the glued graph against the proper amalgam of the sides.

    Works on circuits and ranks only. The glued matroid has the sides as
    restrictions, so its rank never exceeds the amalgam rank; the two are equal
    once every glued circuit is dependent in the amalgam.
    """
    for side in (left.gaining, right.gaining):
        for C in _frame_circuits(side):
            if amalgam.frame_rank(C) != len(C) - 1:
                logger.info(f"side circuit {sorted(C)} has glued rank {amalgam.frame_rank(C)}")
                return DIFFERENT
    eta = AmalgamRank(left.gaining, right.gaining)
    sides = (eta.left_edges, eta.right_edges)
    checked = 0
    for C in _frame_circuits(amalgam):
        if any(C <= edges for edges in sides):
            side = left.gaining if C <= eta.left_edges else right.gaining
            if side.frame_rank(C) != len(C) - 1:
                logger.info(f"glued circuit {sorted(C)} has side rank {side.frame_rank(C)}")
                return DIFFERENT
            continue
        rank = eta(C)
        if rank != len(C) - 1:
            logger.info(f"glued circuit {sorted(C)} has amalgam rank {rank}")
            return DIFFERENT
        checked += 1
    if eta(eta.left_edges | eta.right_edges) != amalgam.frame_rank():
        return DIFFERENT
    logger.debug(f"{checked} crossing circuits agree with the amalgam rank")
    return EQUAL
