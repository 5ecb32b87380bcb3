"""Registry classification of coloured systems and bounded searches for clefts."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.backend.config_loader import CONFIG
from src.backend.errors import BudgetExceeded, ColouredError, FormulaError
from src.backend.coloured.registry import RegistryValue, registry
from src.backend.coloured.systems import ColouredComplement, ColouredSystem, coloured_sum
from src.backend.logic.formula import Formula
from src.backend.logic.semantics import lambda_bound, satisfies
from src.backend.utils.parallel import first_match, ordered_map

logger = logging.getLogger(__name__)


@dataclass
class Classification:
    """Systems grouped by registry value, with the bound the class count must respect."""

    classes: List[List[int]]
    values: List[RegistryValue]
    bound: int
    system_class: List[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.classes)

    @property
    def within_bound(self) -> bool:
        return self.count <= self.bound

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"system": i, "class": c, "registry_nodes": self.values[c].node_count}
            for i, c in enumerate(self.system_class)
        ]
        return pd.DataFrame(rows, columns=["system", "class", "registry_nodes"])


def _check_shared_colours(systems: Sequence[ColouredSystem]) -> Tuple[str, ...]:
    if not systems:
        raise ColouredError("no systems to classify")
    colours = systems[0].colours
    for m in systems[1:]:
        if m.colours != colours:
            raise ColouredError(f"colour sets differ: {colours} vs {m.colours}")
    return colours


def classify_systems(systems: Sequence[ColouredSystem], f: Formula, delta: int, threads: Optional[int] = None) -> Classification:
    """Partition systems by their registry for the sentence f (S = Var(f), empty sigma)."""
    colours = _check_shared_colours(systems)
    if not f.is_sentence:
        raise FormulaError("classification needs a sentence", rule="sentence")
    values = ordered_map(lambda m: registry(m, f, {}, f.var, delta), systems, threads)
    index: Dict[RegistryValue, int] = {}
    classes: List[List[int]] = []
    system_class: List[int] = []
    for i, value in enumerate(values):
        if value not in index:
            index[value] = len(classes)
            classes.append([])
        classes[index[value]].append(i)
        system_class.append(index[value])
    distinct = list(index)
    bound = lambda_bound(f, len(f.var), len(colours), delta)
    logger.info(f"{len(systems)} systems fall into {len(classes)} registry classes (bound {bound})")
    return Classification(classes, distinct, bound, system_class)


def all_systems(ground: Sequence[str], colours: Sequence[str]) -> Iterator[ColouredSystem]:
    """Every colouring of the subsets of ground, in counter order over the table."""
    n = len(ground)
    total = len(colours) ** (1 << n)
    if total > CONFIG["search_cap"]:
        raise BudgetExceeded("search_cap", CONFIG["search_cap"], total)
    for table in itertools.product(range(len(colours)), repeat=1 << n):
        yield ColouredSystem(ground, colours, table)


# ==================== CLEFTS ====================

@dataclass(frozen=True)
class Cleft:
    complement: ColouredComplement
    tau: Tuple[Tuple[int, Tuple[str, ...]], ...]
    satisfied_side: int  # 1 or 2


def _fresh_ground(k: int, taken: set) -> Tuple[str, ...]:
    out = []
    i = 1
    while len(out) < k:
        label = f"v{i}"
        if label not in taken:
            out.append(label)
        i += 1
    return tuple(out)


def _restrict(m: ColouredSystem, f: Formula, sigma: Optional[Mapping]) -> Dict[int, int]:
    sigma = {int(i): m.mask(X) for i, X in (sigma or {}).items()}
    missing = f.free - set(sigma)
    if missing:
        raise ColouredError(f"sigma leaves {sorted(missing)} unassigned")
    return {i: sigma[i] for i in f.free}


def _tables(k: int, t: int) -> Iterator[np.ndarray]:
    """All acceptance tables on 2^k x t cells; the first cell is the most significant bit."""
    cells = (1 << k) * t
    weights = 1 << np.arange(cells - 1, -1, -1, dtype=np.int64)
    for code in range(1 << cells):
        yield ((code & weights) != 0).reshape(1 << k, t)


def cleft_search(
    m1: ColouredSystem,
    m2: ColouredSystem,
    f: Formula,
    sigmas: Tuple[Optional[Mapping], Optional[Mapping]] = (None, None),
    max_ground: int = 1,
    threads: Optional[int] = None,
) -> Optional[Cleft]:
    """
    First complement and tau (canonical order) on which exactly one coloured sum satisfies f.

    Complements are tried by ground size 0..max_ground, then acceptance
    table in counter order, then tau in lexicographic order of subset masks.
    """
    if m1.colours != m2.colours:
        raise ColouredError(f"colour sets differ: {m1.colours} vs {m2.colours}")
    if max_ground > CONFIG["cleft_max_ground"]:
        raise BudgetExceeded("cleft_max_ground", CONFIG["cleft_max_ground"], max_ground)
    s1, s2 = _restrict(m1, f, sigmas[0]), _restrict(m2, f, sigmas[1])
    free = sorted(f.free)
    t = len(m1.colours)
    work = sum((1 << ((1 << k) * t)) * (1 << (k * len(free))) for k in range(max_ground + 1))
    if work > CONFIG["search_cap"]:
        raise BudgetExceeded("search_cap", CONFIG["search_cap"], work)

    taken = set(m1.ground) | set(m2.ground)
    for k in range(max_ground + 1):
        ground = _fresh_ground(k, taken)
        taus = list(itertools.product(range(1 << k), repeat=len(free)))

        def try_complement(table: np.ndarray) -> Optional[Cleft]:
            pi = ColouredComplement(ground, m1.colours, table, max_colours=t)
            h1, h2 = coloured_sum(m1, pi), coloured_sum(m2, pi)
            for images in taus:
                theta1 = {z: s1[z] | (y << m1.size) for z, y in zip(free, images)}
                theta2 = {z: s2[z] | (y << m2.size) for z, y in zip(free, images)}
                a, b = satisfies(h1, f, theta1), satisfies(h2, f, theta2)
                if a != b:
                    tau = tuple((z, pi.labels(y)) for z, y in zip(free, images))
                    return Cleft(pi, tau, 1 if a else 2)
            return None

        hit = first_match(try_complement, _tables(k, t), threads)
        if hit is not None:
            logger.info(f"cleft found with |V|={k}, satisfied by side {hit.satisfied_side}")
            return hit
        logger.debug(f"no cleft with |V|={k}")
    return None


@dataclass(frozen=True)
class EquivalenceReport:
    """Registry verdict and bounded cleft outcome, kept apart."""

    registry_equal: bool
    cleft: Optional[Cleft]
    max_ground: int

    def summary(self) -> str:
        if self.registry_equal:
            return "EQUAL (registry match)"
        if self.cleft is not None:
            return f"DIFFERENT (cleft at |V|={self.cleft.complement.size})"
        return f"UNDECIDED (registries differ, no cleft up to |V|={self.max_ground})"


def equivalence_report(
    m1: ColouredSystem,
    m2: ColouredSystem,
    f: Formula,
    delta: int,
    max_ground: int = 1,
    sigmas: Tuple[Optional[Mapping], Optional[Mapping]] = (None, None),
) -> EquivalenceReport:
    if m1.colours != m2.colours:
        raise ColouredError(f"colour sets differ: {m1.colours} vs {m2.colours}")
    r1 = registry(m1, f, sigmas[0], f.var, delta)
    r2 = registry(m2, f, sigmas[1], f.var, delta)
    if r1 == r2:
        return EquivalenceReport(True, None, max_ground)
    return EquivalenceReport(False, cleft_search(m1, m2, f, sigmas, max_ground), max_ground)
