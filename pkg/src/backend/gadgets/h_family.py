"""
The H gadget family over a generating set a_1..a_n closed under inverses.

The star part carries the A, B and C rows, the K pair and the identity
connectors; the full gadget adds six parallel D pairs and one Q loop per
vertex, gained so that no cycle through them is balanced.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from src.backend.algebra.groups import FiniteGroup, GeneratingSet, word_lengths
from src.backend.config_loader import CONFIG
from src.backend.errors import BudgetExceeded, GadgetError, GroupError
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

FAMILY = "h"
BASE_VERTICES = ("delta1", "delta2")


def _vertices(N: int) -> List[str]:
    return ["alpha1", "alpha2", "beta1", "beta2"] + [f"gamma{i}" for i in range(1, N + 2)] + list(BASE_VERTICES)


def _row(prefix: str, u: str, v: str, gens: Sequence[int], extra: Optional[int] = None) -> List[Tuple[Edge, int]]:
    row = [(Edge(f"{prefix}_Id", u, v), 0)]
    row += [(Edge(f"{prefix}_{j}", u, v), g) for j, g in enumerate(gens, start=1)]
    if extra is not None:
        row.append((Edge(f"{prefix}_s", u, v), extra))
    return row


def _connectors(N: int) -> List[Tuple[str, str]]:
    return [("beta1", "alpha1"), ("alpha2", "beta2"), (f"gamma{N + 1}", "beta2"), ("beta1", "delta1"), ("delta2", "beta2")]


def _check_params(group: FiniteGroup, gens: Sequence[int], s: int, M: int, N: int) -> Dict[int, int]:
    if N < 1:
        raise GadgetError(f"N must be at least 1, got {N}")
    if not gens:
        raise GadgetError("the generating set is empty")
    if len(set(gens)) != len(gens):
        raise GadgetError("generators must be distinct")
    for g in list(gens) + [s, M]:
        if not 0 <= g < group.order:
            raise GadgetError(f"{g} is not an element of {group.label}")
    try:
        lengths = word_lengths(GeneratingSet(group, tuple(gens)))
    except GroupError as exc:
        raise GadgetError(str(exc)) from exc
    fs = lengths.get(s)
    if fs != N:
        raise GadgetError(f"word length of s={group.names[s]} is {fs}, need exactly N={N}")
    fm = lengths.get(M)
    if fm is None:
        raise GadgetError(f"M={group.names[M]} is not generated by the generating set")
    if fm < 2 * N + 1:
        raise GadgetError(f"word length of M={group.names[M]} is {fm}, need at least {2 * N + 1}")
    return lengths


@dataclass
class _Parts:
    vertices: List[str]
    star: List[Tuple[Edge, int]]
    d_edges: List[Edge]
    q_edges: List[Edge]
    collections: Dict[str, Tuple[str, ...]]


def _parts(gens: Sequence[int], s: int, M: int, N: int) -> _Parts:
    vertices = _vertices(N)
    rows = {"A": _row("A", "alpha1", "alpha2", gens, s)}
    for i in range(1, N + 1):
        rows[f"B{i}"] = _row(f"B{i}", f"gamma{i}", f"gamma{i + 1}", gens)
    rows["C"] = _row("C", "delta1", "delta2", gens, s)
    k_edges = [(Edge("K1", "beta1", "alpha1"), M), (Edge("K2", "beta1", "gamma1"), M)]
    t_edges = [(Edge(f"T{i}", u, v), 0) for i, (u, v) in enumerate(_connectors(N), start=1)]

    star = [pair for row in rows.values() for pair in row] + k_edges + t_edges
    pairs = [("beta1", "alpha1"), ("alpha2", "beta2"), ("beta1", "gamma1"), (f"gamma{N + 1}", "beta2"), ("beta1", "delta1"), ("delta2", "beta2")]
    d_edges = [Edge(f"D{i}_{j}", u, v) for i, (u, v) in enumerate(pairs, start=1) for j in (1, 2)]
    loop_at = ["alpha1", "alpha2", "beta1", "beta2"] + [f"gamma{i}" for i in range(1, N + 2)] + list(BASE_VERTICES)
    q_edges = [Edge(f"Q{i}", v, v) for i, v in enumerate(loop_at, start=1)]

    collections = {name: tuple(e.label for e, _ in row) for name, row in rows.items()}
    collections["K"] = ("K1", "K2")
    collections["T"] = tuple(row[0][0].label for row in rows.values()) + tuple(e.label for e, _ in t_edges)
    for i in range(1, len(pairs) + 1):
        collections[f"D{i}"] = (f"D{i}_1", f"D{i}_2")
    collections["Q"] = tuple(e.label for e in q_edges)
    return _Parts(vertices, star, d_edges, q_edges, collections)


def build_h_gadget(
    group: FiniteGroup,
    gens: Sequence[int],
    s: int,
    M: int,
    d_values: Optional[Sequence[int]] = None,
    q_values: Optional[Sequence[int]] = None,
    N: int = 1,
    star_only: bool = False,
) -> Gadget:
    """
    Build the H gadget for generators ``gens``.

    Args:
        group: finite gain group
        gens: a_1..a_n as element indices, closed under inverses
        s: element of word length exactly N
        M: element of word length at least 2N+1
        d_values: gains of D1_1, D1_2, ..., D6_2; chosen greedily when omitted
        q_values: gains of Q1..Q_{N+7}; chosen greedily when omitted
        N: number of B rows
        star_only: build only the star part (no D pairs, no Q loops)

    Raises:
        GadgetError: a side condition fails; the message names the word length or the balanced cycle
    """
    gens = [int(g) for g in gens]
    _check_params(group, gens, s, M, N)
    parts = _parts(gens, s, M, N)
    star_gains = {e.label: g for e, g in parts.star}
    star_edges = [e for e, _ in parts.star]
    elements = {"gens": tuple(gens), "s": (s,), "M": (M,)}
    numbers = {"n": len(gens), "N": N}

    if star_only:
        collections = {k: v for k, v in parts.collections.items() if not k.startswith(("D", "Q"))}
        gaining = make_gaining(parts.vertices, star_edges, group, star_gains)
        logger.info(f"built H* gadget over {group.label}: {len(star_edges)} edges, n={len(gens)}, N={N}")
        return Gadget(FAMILY, gaining, collections, elements, numbers, parts.collections["C"], BASE_VERTICES, star_only=True)

    edges = star_edges + parts.d_edges + parts.q_edges
    d_labels = [e.label for e in parts.d_edges]
    q_labels = [e.label for e in parts.q_edges]
    gains = complete_layer(edges, star_gains, group, d_labels, q_labels, d_values, q_values)
    gaining = make_gaining(parts.vertices, edges, group, gains)
    layer = tuple(d_labels + q_labels)
    bad = dagger_violation(gaining, layer)
    if bad is not None:
        raise GadgetError(f"edge {bad[0]} lies on the balanced cycle {' '.join(bad[1])}")
    elements["d"] = tuple(gains[x] for x in d_labels)
    elements["q"] = tuple(gains[x] for x in q_labels)
    base = parts.collections["C"] + (f"Q{N + 6}", f"Q{N + 7}")
    logger.info(f"built H gadget over {group.label}: {len(edges)} edges, n={len(gens)}, N={N}")
    return Gadget(FAMILY, gaining, parts.collections, elements, numbers, base, BASE_VERTICES, layer_edges=layer)


def find_h_params(group: FiniteGroup, gens: Sequence[int], N: int, star_only: bool = False) -> Optional[DaggerParams]:
    """Least-index s and M for the H family, then greedy D/Q values; None when the group is too small."""
    gens = [int(g) for g in gens]
    try:
        lengths = word_lengths(GeneratingSet(group, tuple(gens)))
    except GroupError as exc:
        raise GadgetError(str(exc)) from exc
    s = min((g for g, k in lengths.items() if k == N), default=None)
    M = min((g for g, k in lengths.items() if k >= 2 * N + 1), default=None)
    if s is None or M is None:
        logger.info(f"no s/M pair for N={N} in {group.label} (diameter {max(lengths.values())})")
        return None
    if star_only:
        return DaggerParams(M, s)
    try:
        gadget = build_h_gadget(group, gens, s, M, N=N)
    except GadgetError as exc:
        logger.info(f"no D/Q layer over {group.label}: {exc}")
        return None
    return DaggerParams(M, s, gadget.elements["d"], gadget.elements["q"])


# ==================== CYCLES ====================

@dataclass(frozen=True)
class ClosingCycle:
    word: Tuple[str, ...]
    walk: Tuple[str, ...]
    gain: int
    letters: int

    @property
    def balanced(self) -> bool:
        return self.gain == 0


def _require(h: Gadget) -> None:
    if h.family != FAMILY:
        raise GadgetError(f"expected an H gadget, got family {h.family!r}")


def _closing_walk(word: Sequence[str]) -> List[str]:
    walk = ["gamma1"]
    for i, label in enumerate(word, start=1):
        walk += [label, f"gamma{i + 1}"]
    return walk + ["T3", "beta2", "T2", "alpha2", "A_s", "alpha1", "K1", "beta1", "K2", "gamma1"]


def closing_cycle_lengths(h: Gadget) -> List[ClosingCycle]:
    """
    Closing cycle of every B-row word, in row-label order.

    The cycle runs along the chosen B edges, back to beta2, through A_s and
    returns through K1 and K2, so its gain is the row product times s^-1.
    """
    _require(h)
    N = h.numbers["N"]
    rows = [h.collection(f"B{i}") for i in range(1, N + 1)]
    total = 1
    for row in rows:
        total *= len(row)
    if total > CONFIG["search_cap"]:
        raise BudgetExceeded("search_cap", CONFIG["search_cap"], total)
    out = []
    for word in itertools.product(*rows):
        walk = _closing_walk(word)
        letters = sum(1 for label in word if not label.endswith("_Id"))
        out.append(ClosingCycle(tuple(word), tuple(walk), h.gaining.walk_gain(walk), letters))
    return out


def minimal_balanced_letters(h: Gadget) -> Optional[int]:
    """Fewest non-identity letters over the balanced closing cycles."""
    return min((c.letters for c in closing_cycle_lengths(h) if c.balanced), default=None)


def transfer_walk(row: str) -> List[str]:
    """A edge then the C edge with the same suffix back through the identity connectors."""
    suffix = row.split("_", 1)[1]
    return ["beta1", "T1", "alpha1", f"A_{suffix}", "alpha2", "T2", "beta2", "T5", "delta2", f"C_{suffix}", "delta1", "T4", "beta1"]


def designated_h_cycles(h: Gadget) -> List[DesignatedCycle]:
    _require(h)
    out = []
    matching = next((c for c in closing_cycle_lengths(h) if c.balanced and c.letters == h.numbers["N"]), None)
    if matching is not None:
        out.append(designated(h, "matching", matching.walk))
    for label in h.collection("A"):
        out.append(designated(h, f"transfer-{label}", transfer_walk(label)))
    return out
