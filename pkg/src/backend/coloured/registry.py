"""
Registries of coloured systems and sympathy with complements.

A registry value records just enough about (system, formula, partial
interpretation) to decide, against any complement, whether the coloured sum
satisfies the formula. Values are compared structurally; finite sets are
kept sorted and duplicate free so equal registries are equal objects.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Tuple

from src.backend.config_loader import CONFIG
from src.backend.errors import ColouredError, FormulaError
from src.backend.logic.formula import And, Count, Exists, Formula, Hyp, Not, Subset
from src.backend.coloured.systems import ColouredComplement, ColouredSystem
from src.backend.utils.bitsets import popcount

logger = logging.getLogger(__name__)

TABLE1 = "table1"
TABLE2 = "table2"
TABLE3 = "table3"
PAIR = "pair"
FINSET = "finset"

_TAG_RANK = {TABLE1: 0, TABLE2: 1, TABLE3: 2, PAIR: 3, FINSET: 4}


@dataclass(frozen=True)
class RegistryValue:
    """
    Tagged registry value.

    ``entries`` holds ((variable, ...), value) pairs for the three table tags,
    (left, right) for a pair, and the sorted members for a finite set.
    """

    tag: str
    entries: tuple

    @cached_property
    def sort_key(self) -> tuple:
        if self.tag in (PAIR, FINSET):
            return (_TAG_RANK[self.tag], tuple(child.sort_key for child in self.entries))
        return (_TAG_RANK[self.tag], self.entries)

    def __lt__(self, other: "RegistryValue") -> bool:
        return self.sort_key < other.sort_key

    def lookup(self, *variables: int) -> int:
        for key, value in self.entries:
            if key == variables:
                return value
        raise ColouredError(f"registry table has no entry for {variables}")

    @property
    def node_count(self) -> int:
        if self.tag in (PAIR, FINSET):
            return 1 + sum(child.node_count for child in self.entries)
        return 1

    def render(self, colours: Optional[Tuple[str, ...]] = None) -> str:
        if self.tag == PAIR:
            left, right = self.entries
            return f"<{left.render(colours)}, {right.render(colours)}>"
        if self.tag == FINSET:
            return "{" + ", ".join(child.render(colours) for child in self.entries) + "}"
        name = {TABLE1: "T1", TABLE2: "T2", TABLE3: "T3"}[self.tag]
        cells = []
        for key, value in self.entries:
            var = ",".join(f"Z{i}" for i in key)
            if self.tag == TABLE2 and colours is not None:
                value = colours[value]
            cells.append(f"{var}:{value}")
        return f"{name}[" + " ".join(cells) + "]"

    def __str__(self) -> str:
        return self.render()


def finset(values: Iterable[RegistryValue]) -> RegistryValue:
    return RegistryValue(FINSET, tuple(sorted(set(values))))


def _check_delta(f: Formula, delta: int) -> None:
    if delta > CONFIG["delta_max"]:
        raise ColouredError(f"delta {delta} above the configured maximum {CONFIG['delta_max']}")
    if not f.confined(delta):
        raise FormulaError(f"formula needs delta >= {f.min_delta}, got {delta}", rule="delta-confined")


def registry(
    m: ColouredSystem,
    f: Formula,
    sigma: Optional[Mapping] = None,
    S: Optional[Iterable[int]] = None,
    delta: int = 1,
) -> RegistryValue:
    """
    Registry of (m, f, sigma) over the variable set S.

    Args:
        m: coloured system
        f: delta-confined formula
        sigma: images of S - Bound(f) in m's ground, as masks or label collections
        S: variable indices, a superset of Var(f); defaults to Var(f)
        delta: confinement parameter, at most CONFIG delta_max
    """
    S = frozenset(f.var if S is None else S)
    if not f.var <= S:
        missing = ", ".join(f"Z{i}" for i in sorted(f.var - S))
        raise ColouredError(f"variable set must contain every variable of the formula, missing {missing}")
    _check_delta(f, delta)
    sigma = {int(i): m.mask(X) for i, X in (sigma or {}).items()}
    want = S - f.bound
    if set(sigma) != set(want):
        raise ColouredError(
            f"sigma must assign exactly {sorted(want)}, got {sorted(sigma)}"
        )
    value = _registry(m, f, sigma, tuple(sorted(S)), math.factorial(delta))
    logger.debug(f"registry of {f.render()} on |U|={m.size}: {value.node_count} nodes")
    return value


def _registry(m: ColouredSystem, f: Formula, sigma: Dict[int, int], S: Tuple[int, ...], modulus: int) -> RegistryValue:
    if isinstance(f, Count):
        return RegistryValue(TABLE1, tuple(((z,), popcount(sigma[z]) % modulus) for z in S))
    if isinstance(f, Hyp):
        return RegistryValue(TABLE2, tuple(((z,), int(m.table[sigma[z]])) for z in S))
    if isinstance(f, Subset):
        return RegistryValue(
            TABLE3,
            tuple(((a, b), int(sigma[a] & ~sigma[b] == 0)) for a in S for b in S),
        )
    if isinstance(f, Not):
        return _registry(m, f.child, sigma, S, modulus)
    if isinstance(f, And):
        left = dict(sigma)
        left.update({z: 0 for z in f.right.bound - f.left.bound})
        right = dict(sigma)
        right.update({z: 0 for z in f.left.bound - f.right.bound})
        return RegistryValue(PAIR, (_registry(m, f.left, left, S, modulus), _registry(m, f.right, right, S, modulus)))
    if isinstance(f, Exists):
        extended = dict(sigma)
        members = []
        for X in range(m.full_mask + 1):
            extended[f.index] = X
            members.append(_registry(m, f.child, extended, S, modulus))
        return finset(members)
    raise FormulaError(f"unknown formula node {type(f).__name__}")


def sympathetic(
    r: RegistryValue,
    f: Formula,
    pi: ColouredComplement,
    tau: Optional[Mapping] = None,
) -> bool:
    """
    Whether registry r and (pi, tau) are sympathetic for f.

    Args:
        r: registry produced for f
        f: the formula r was produced for
        pi: coloured complement on the registry's colour set
        tau: images of Free(f) in pi's ground, as masks or label collections
    """
    tau = {int(i): pi.mask(Y) for i, Y in (tau or {}).items()}
    if set(tau) != set(f.free):
        raise ColouredError(f"tau must assign exactly {sorted(f.free)}, got {sorted(tau)}")
    return _sympathetic(r, f, pi, tau)


def _expect(r: RegistryValue, tag: str, f: Formula) -> None:
    if r.tag != tag:
        raise ColouredError(f"registry shape {r.tag} does not match formula node {f.kind}")


def _sympathetic(r: RegistryValue, f: Formula, pi: ColouredComplement, tau: Mapping[int, int]) -> bool:
    if isinstance(f, Count):
        _expect(r, TABLE1, f)
        return (r.lookup(f.index) + popcount(tau[f.index])) % f.q == f.p
    if isinstance(f, Hyp):
        _expect(r, TABLE2, f)
        colour = r.lookup(f.index)
        if colour >= len(pi.colours):
            raise ColouredError(f"registry colour {colour} outside the complement's colour set")
        return bool(pi.table[tau[f.index], colour])
    if isinstance(f, Subset):
        _expect(r, TABLE3, f)
        return r.lookup(f.left, f.right) == 1 and tau[f.left] & ~tau[f.right] == 0
    if isinstance(f, Not):
        return not _sympathetic(r, f.child, pi, tau)
    if isinstance(f, And):
        _expect(r, PAIR, f)
        left, right = r.entries
        if not _sympathetic(left, f.left, pi, {z: tau[z] for z in f.left.free}):
            return False
        return _sympathetic(right, f.right, pi, {z: tau[z] for z in f.right.free})
    if isinstance(f, Exists):
        _expect(r, FINSET, f)
        extended = dict(tau)
        for member in r.entries:
            for Y in range(pi.full_mask + 1):
                extended[f.index] = Y
                if _sympathetic(member, f.child, pi, extended):
                    return True
        return False
    raise FormulaError(f"unknown formula node {type(f).__name__}")
