"""
Shared pieces of the gadget families: the Gadget record, closing-path gains,
and the D/Q layer whose cycles must all be unbalanced.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.backend.algebra.groups import FiniteGroup
from src.backend.config_loader import CONFIG
from src.backend.errors import GadgetError, check_budget
from src.backend.graphs.gain import Gaining
from src.backend.graphs.multigraph import Edge, Multigraph
from src.backend.utils.parallel import ordered_map

logger = logging.getLogger(__name__)


@dataclass
class Gadget:
    """A built gadget: its gaining plus the named edge collections used by the proofs."""

    family: str
    gaining: Gaining
    collections: Dict[str, Tuple[str, ...]]
    elements: Dict[str, Tuple[int, ...]]
    numbers: Dict[str, int]
    base_edges: Tuple[str, ...]
    base_vertices: Tuple[str, str]
    star_only: bool = False
    layer_edges: Tuple[str, ...] = field(default_factory=tuple)
    tick: str = ""

    @property
    def graph(self) -> Multigraph:
        return self.gaining.graph

    @property
    def group(self) -> FiniteGroup:
        return self.gaining.group

    def collection(self, name: str) -> Tuple[str, ...]:
        try:
            return self.collections[name]
        except KeyError:
            raise GadgetError(f"gadget has no collection {name!r}") from None

    def q_loops(self) -> Tuple[str, ...]:
        return tuple(label for name, labels in self.collections.items() if name.startswith("Q") for label in labels)

    def manifest_lines(self) -> List[str]:
        names = self.group.names
        lines = [f"family {self.family}"]
        for key, value in self.numbers.items():
            lines.append(f"parameter {key}: {value}")
        for key, values in self.elements.items():
            lines.append(f"parameter {key}: " + " ".join(names[g] for g in values))
        for name, labels in self.collections.items():
            lines.append(f"collection {name}: " + " ".join(labels))
        lines.append("base: " + " ".join(self.base_edges))
        lines.append("base-vertices: " + " ".join(self.base_vertices))
        return lines


# ==================== CLOSING PATHS ====================

def _links(edges: Sequence[Edge], gains: Mapping[str, int], group: FiniteGroup, skip: Optional[str]):
    out: Dict[str, List[Tuple[str, str, int]]] = {}
    for e in edges:
        if e.is_loop or e.label == skip or e.label not in gains:
            continue
        g = gains[e.label]
        out.setdefault(e.u, []).append((e.v, e.label, g))
        out.setdefault(e.v, []).append((e.u, e.label, group.inv(g)))
    return out


def path_gains(
    edges: Sequence[Edge],
    gains: Mapping[str, int],
    group: FiniteGroup,
    start: str,
    end: str,
    skip: Optional[str] = None,
) -> Dict[int, List[str]]:
    """
    Gain of every simple start-end path over the gained edges, with one witnessing walk per gain.

    Edges without a gain yet are ignored; ``skip`` removes one edge. Vertex
    paths are explored depth first in declaration order and parallel edges are
    folded into gain sets, so each gain keeps the first walk that reached it.
    """
    links = _links(edges, gains, group, skip)
    found: Dict[int, List[str]] = {}

    def visit(here: str, seen: frozenset, reached: Dict[int, List[str]]) -> None:
        for nxt in dict.fromkeys(v for v, _, _ in links.get(here, [])):
            if nxt in seen:
                continue
            step: Dict[int, List[str]] = {}
            for g, walk in reached.items():
                for v, label, h in links[here]:
                    if v != nxt:
                        continue
                    key = group.mul(g, h)
                    if key not in step:
                        step[key] = walk + [label, nxt]
            if nxt == end:
                for key, walk in step.items():
                    found.setdefault(key, walk)
            else:
                visit(nxt, seen | {nxt}, step)

    if start == end:
        return {0: [start]}
    visit(start, frozenset([start]), {0: [start]})
    return found


def closing_violation(
    edges: Sequence[Edge],
    gains: Mapping[str, int],
    group: FiniteGroup,
    label: str,
) -> Optional[List[str]]:
    """A balanced cycle through ``label`` as a closed walk, or None."""
    e = next(x for x in edges if x.label == label)
    g = gains[label]
    if e.is_loop:
        return [e.u, label, e.u] if g == 0 else None
    closing = path_gains(edges, gains, group, e.v, e.u, skip=label)
    target = group.inv(g)
    if target in closing:
        return [e.u, label] + closing[target]
    return None


def complete_layer(
    edges: Sequence[Edge],
    star_gains: Mapping[str, int],
    group: FiniteGroup,
    d_labels: Sequence[str],
    q_labels: Sequence[str],
    d_values: Optional[Sequence[int]] = None,
    q_values: Optional[Sequence[int]] = None,
) -> Dict[str, int]:
    """
    Gains for the D edges then the Q loops such that no cycle through any of them is balanced.

    Given values are checked in order; missing ones are chosen greedily as the
    least element index that keeps every new cycle unbalanced. Each edge is
    checked when it is added, against everything placed before it.
    """
    for given, labels, name in ((d_values, d_labels, "d"), (q_values, q_labels, "q")):
        if given is not None and len(given) != len(labels):
            raise GadgetError(f"expected {len(labels)} {name}-values, got {len(given)}")
    gains = dict(star_gains)
    order = [(label, None if d_values is None else d_values[i]) for i, label in enumerate(d_labels)]
    order += [(label, None if q_values is None else q_values[i]) for i, label in enumerate(q_labels)]
    by_label = {e.label: e for e in edges}
    for label, value in order:
        e = by_label[label]
        if value is not None:
            if not 0 <= value < group.order:
                raise GadgetError(f"value {value} for {label} is not an element of {group.label}")
            gains[label] = int(value)
            bad = closing_violation(edges, gains, group, label)
            if bad is not None:
                raise GadgetError(f"edge {label} closes a balanced cycle: {' '.join(bad)}")
            continue
        if e.is_loop:
            forbidden = {0}
        else:
            closing = path_gains(edges, gains, group, e.v, e.u, skip=label)
            forbidden = {group.inv(p) for p in closing}
        choice = next((g for g in range(group.order) if g not in forbidden), None)
        if choice is None:
            raise GadgetError(f"{group.label} is too small: every gain for {label} closes a balanced cycle")
        gains[label] = choice
    logger.debug(f"layer of {len(order)} edges completed over {group.label}")
    return gains


def dagger_violation(gaining: Gaining, labels: Sequence[str], threads: Optional[int] = None) -> Optional[Tuple[str, List[str]]]:
    """First listed edge lying on a balanced cycle, with that cycle."""
    edges = gaining.graph.edges
    gains = gaining.gains
    found = ordered_map(lambda label: closing_violation(edges, gains, gaining.group, label), labels, threads)
    for label, bad in zip(labels, found):
        if bad is not None:
            return label, bad
    return None


@dataclass(frozen=True)
class DaggerParams:
    """Parameters satisfying the gadget side conditions; s is only used by the H family."""

    M: int
    s: Optional[int] = None
    d_values: Optional[Tuple[int, ...]] = None
    q_values: Optional[Tuple[int, ...]] = None


def make_gaining(vertices: Sequence[str], edges: Sequence[Edge], group: FiniteGroup, gains: Mapping[str, int]) -> Gaining:
    check_budget("gadget_max_edges", CONFIG["gadget_max_edges"], len(edges))
    graph = Multigraph(vertices, edges, max_edges=CONFIG["gadget_max_edges"])
    return Gaining(graph, group, gains)


@dataclass(frozen=True)
class DesignatedCycle:
    name: str
    walk: Tuple[str, ...]
    gain: int

    @property
    def balanced(self) -> bool:
        return self.gain == 0

    @property
    def edges(self) -> Tuple[str, ...]:
        return self.walk[1::2]


def designated(gadget: Gadget, name: str, walk: Sequence[str]) -> DesignatedCycle:
    return DesignatedCycle(name, tuple(walk), gadget.gaining.walk_gain(walk))
