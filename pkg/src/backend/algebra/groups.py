"""
Finite groups as Cayley tables.

Elements are indices into a fixed multiplication table, index 0 is the
identity. Every routine here is a pure function of the table, so results are
deterministic and safe to share between threads.
"""

import itertools
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy.combinatorics.named_groups import SymmetricGroup

from src.backend.config_loader import CONFIG
from src.backend.errors import GroupError, check_budget

logger = logging.getLogger(__name__)


class FiniteGroup:
    """
    A finite group given by its multiplication table.

    Args:
        table: order x order array, ``table[g, h]`` is the index of g*h
        names: one display string per element (no whitespace)
        label: short description used in reports (e.g. ``cyclic6``)
        assoc_check_max: associativity is verified for orders up to this bound
    """

    def __init__(
        self,
        table,
        names: Sequence[str],
        label: str = "",
        assoc_check_max: Optional[int] = None,
    ):
        arr = np.asarray(table, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise GroupError(f"group table must be a non-empty square array, got shape {arr.shape}")
        n = arr.shape[0]
        if len(names) != n:
            raise GroupError(f"expected {n} element names, got {len(names)}")
        if len(set(names)) != n:
            raise GroupError("element names must be distinct")
        if arr.min() < 0 or arr.max() >= n:
            raise GroupError("group table entries out of range")

        ident = np.arange(n)
        if not (np.array_equal(arr[0], ident) and np.array_equal(arr[:, 0], ident)):
            raise GroupError("row and column 0 must be the identity permutation")
        if not (np.all(np.sort(arr, axis=1) == ident) and np.all(np.sort(arr, axis=0) == ident[:, None])):
            raise GroupError("group table is not a Latin square")

        limit = CONFIG["group_assoc_check_max"] if assoc_check_max is None else assoc_check_max
        if n <= limit:
            left = arr[arr]
            right = arr[ident[:, None, None], arr[None, :, :]]
            if not np.array_equal(left, right):
                a, b, c = (int(x[0]) for x in np.nonzero(left != right))
                raise GroupError(f"associativity fails for ({names[a]}, {names[b]}, {names[c]})")

        arr.setflags(write=False)
        self.table = arr
        self.names: Tuple[str, ...] = tuple(names)
        self.label = label or f"group{n}"
        inv = np.argmin(arr, axis=1)
        inv.setflags(write=False)
        self._inverse = inv
        self._index = {name: i for i, name in enumerate(self.names)}

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def identity(self) -> int:
        return 0

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self._inverse[g])

    def product(self, elements: Iterable[int]) -> int:
        acc = 0
        for x in elements:
            acc = int(self.table[acc, x])
        return acc

    def power(self, g: int, k: int) -> int:
        base = g if k >= 0 else self.inv(g)
        acc = 0
        for _ in range(abs(k)):
            acc = int(self.table[acc, base])
        return acc

    def element_order(self, g: int) -> int:
        k, acc = 1, g
        while acc != 0:
            acc = int(self.table[acc, g])
            k += 1
        return k

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GroupError(f"unknown element {name!r} in {self.label}") from None

    def is_subgroup(self, elements: Iterable[int]) -> bool:
        members = sorted(set(elements))
        if not members or members[0] != 0:
            return False
        sub = self.table[np.ix_(members, members)]
        return bool(np.isin(sub, members).all())

    def subgroup_table(self, elements: Iterable[int]) -> Tuple["FiniteGroup", Tuple[int, ...]]:
        """Re-index a subgroup as its own group; returns it with the embedding map."""
        members = sorted(set(elements))
        if not self.is_subgroup(members):
            raise GroupError(f"{members} is not a subgroup of {self.label}")
        position = {g: i for i, g in enumerate(members)}
        rows = [[position[int(self.table[a, b])] for b in members] for a in members]
        sub = FiniteGroup(rows, [self.names[g] for g in members], label=f"{self.label}<{len(members)}>", assoc_check_max=0)
        return sub, tuple(members)

    def all_subgroups(self) -> List[Tuple[int, ...]]:
        """Every subgroup as a sorted element tuple, ordered by (size, elements)."""
        found = {subgroup_generate(self, [g]) for g in range(self.order)}
        frontier = list(found)
        while frontier:
            nxt = []
            for sub in frontier:
                members = set(sub)
                for g in range(self.order):
                    if g in members:
                        continue
                    joined = subgroup_generate(self, list(sub) + [g])
                    if joined not in found:
                        found.add(joined)
                        nxt.append(joined)
            frontier = nxt
        return sorted(found, key=lambda s: (len(s), s))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.names, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.label} order={self.order}>"


# ==================== CONSTRUCTORS ====================

def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError(f"cyclic group needs n >= 1, got {n}")
    idx = np.arange(n)
    return FiniteGroup(np.add.outer(idx, idx) % n, [str(i) for i in range(n)], label=f"cyclic{n}")


def trivial() -> FiniteGroup:
    return cyclic(1)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; element e*n+k is r^k s^e."""
    if n < 1:
        raise GroupError(f"dihedral group needs n >= 1, got {n}")
    order = 2 * n
    k = np.arange(order) % n
    e = np.arange(order) // n
    sign = np.where(e == 1, -1, 1)
    rot = (k[:, None] + sign[:, None] * k[None, :]) % n
    ref = (e[:, None] + e[None, :]) % 2
    names = [f"r{i}" for i in range(n)] + [f"s{i}" for i in range(n)]
    return FiniteGroup(ref * n + rot, names, label=f"dihedral{n}")


def symmetric(n: int) -> FiniteGroup:
    """Symmetric group on n <= 5 points; elements sorted by array form, names in cycle notation."""
    if not 1 <= n <= 5:
        raise GroupError(f"symmetric group supported for 1 <= n <= 5, got {n}")
    perms = sorted(SymmetricGroup(n).generate(), key=lambda p: p.array_form)
    position = {tuple(p.array_form): i for i, p in enumerate(perms)}
    rows = [[position[tuple((p * q).array_form)] for q in perms] for p in perms]
    return FiniteGroup(rows, [_cycle_name(p) for p in perms], label=f"symmetric{n}")


def _cycle_name(perm) -> str:
    cycles = perm.cyclic_form
    if not cycles:
        return "e"
    return "".join("(" + "".join(str(i + 1) for i in c) + ")" for c in cycles)


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Element i*|b|+j is the pair (a_i, b_j)."""
    m = b.order
    rows = a.table.repeat(m, axis=0).repeat(m, axis=1) * m + np.tile(b.table, (a.order, a.order))
    names = [f"({x},{y})" for x in a.names for y in b.names]
    return FiniteGroup(rows, names, label=f"{a.label}x{b.label}")


def from_table(names: Sequence[str], rows: Sequence[Sequence[str]], label: str = "table") -> FiniteGroup:
    """Build a group from a table written with element names; the first name must be the identity."""
    index = {name: i for i, name in enumerate(names)}
    try:
        table = [[index[x] for x in row] for row in rows]
    except KeyError as exc:
        raise GroupError(f"table mentions undeclared element {exc.args[0]!r}") from None
    return FiniteGroup(table, names, label=label)


_BUILTIN = re.compile(r"^(cyclic|dihedral|symmetric)(\d+)$")


def builtin(spec: str) -> FiniteGroup:
    """Resolve shorthand such as ``cyclic20``, ``symmetric3`` or ``cyclic2xcyclic2``."""
    parts = spec.split("x")
    groups = []
    for part in parts:
        match = _BUILTIN.match(part.strip())
        if not match:
            raise GroupError(f"unknown group shorthand {spec!r}")
        kind, n = match.group(1), int(match.group(2))
        groups.append({"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric}[kind](n))
    result = groups[0]
    for g in groups[1:]:
        result = direct_product(result, g)
    return result


# ==================== SUBGROUPS AND WORD LENGTHS ====================

def subgroup_generate(group: FiniteGroup, seeds: Iterable[int]) -> Tuple[int, ...]:
    """Smallest subgroup containing ``seeds``, sorted ascending."""
    gens = sorted({int(s) for s in seeds})
    for s in gens:
        if not 0 <= s < group.order:
            raise GroupError(f"seed {s} outside 0..{group.order - 1}")
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = int(group.table[x, s])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return tuple(sorted(seen))


def local_finiteness_profile(group: FiniteGroup, k: int, cap: Optional[int] = None) -> List[int]:
    """Largest subgroup generated by at most j elements, for j = 0..k."""
    cap = CONFIG["search_cap"] if cap is None else cap
    profile = [1]
    best = 1
    for j in range(1, k + 1):
        if best < group.order:
            check_budget("search_cap", cap, comb(group.order, j))
            for seeds in itertools.combinations(range(group.order), j):
                best = max(best, len(subgroup_generate(group, seeds)))
                if best == group.order:
                    break
        profile.append(best)
    return profile


@dataclass(frozen=True)
class GeneratingSet:
    """Generating set in the word-length sense: closed under inverses."""

    group: FiniteGroup
    elements: Tuple[int, ...]

    def __post_init__(self):
        members = set(self.elements)
        missing = [self.group.names[g] for g in self.elements if self.group.inv(g) not in members]
        if missing:
            raise GroupError(f"generating set is not closed under inverses: missing inverse of {missing}")


def word_lengths(gens: GeneratingSet) -> Dict[int, int]:
    """Breadth-first distances from the identity in the Cayley graph of ``gens``."""
    group = gens.group
    dist = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for a in gens.elements:
            y = int(group.table[x, a])
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def word_length(gens: GeneratingSet, g: int) -> Optional[int]:
    return word_lengths(gens).get(g)


# ==================== MONOMORPHISMS ====================

@dataclass(frozen=True)
class Monomorphism:
    source: FiniteGroup
    target: FiniteGroup
    map: Tuple[int, ...]

    def __post_init__(self):
        images = np.asarray(self.map, dtype=np.int64)
        if len(images) != self.source.order or len(set(self.map)) != len(self.map):
            raise GroupError("monomorphism map must be injective and total")
        lhs = self.target.table[images[:, None], images[None, :]]
        if images[0] != 0 or not np.array_equal(lhs, images[self.source.table]):
            raise GroupError("map does not respect multiplication")

    def __call__(self, g: int) -> int:
        return self.map[g]

    def compose(self, after: "Monomorphism") -> "Monomorphism":
        """``after`` applied to this map's images."""
        return Monomorphism(self.source, after.target, tuple(after.map[x] for x in self.map))


def minimal_generators(group: FiniteGroup) -> Tuple[int, ...]:
    """Greedy generating set: ascending elements not yet in the generated subgroup."""
    gens: List[int] = []
    current = {0}
    for g in range(group.order):
        if g not in current:
            gens.append(g)
            current = set(subgroup_generate(group, gens))
    return tuple(gens)


def _extend(source: FiniteGroup, target: FiniteGroup, gens, images) -> Optional[List[int]]:
    mapping = [-1] * source.order
    mapping[0] = 0
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for a, b in zip(gens, images):
            y = int(source.table[x, a])
            img = int(target.table[mapping[x], b])
            if mapping[y] == -1:
                mapping[y] = img
                queue.append(y)
            elif mapping[y] != img:
                return None
    return mapping


def iter_monomorphisms(source: FiniteGroup, target: FiniteGroup, cap: Optional[int] = None) -> Iterator[Monomorphism]:
    """Yield monomorphisms in generator-image order (not yet canonical)."""
    if target.order % source.order:
        return
    cap = CONFIG["search_cap"] if cap is None else cap
    gens = minimal_generators(source)
    target_orders = [target.element_order(h) for h in range(target.order)]
    candidates = [
        [h for h in range(target.order) if target_orders[h] == source.element_order(a)] for a in gens
    ]
    check_budget("search_cap", cap, int(np.prod([len(c) for c in candidates], dtype=object)))
    for images in itertools.product(*candidates):
        mapping = _extend(source, target, gens, images)
        if mapping is not None and len(set(mapping)) == source.order:
            yield Monomorphism(source, target, tuple(mapping))


def enumerate_monomorphisms(source: FiniteGroup, target: FiniteGroup, cap: Optional[int] = None) -> List[Monomorphism]:
    monos = sorted(iter_monomorphisms(source, target, cap), key=lambda m: m.map)
    logger.debug(f"{len(monos)} monomorphisms {source.label} -> {target.label}")
    return monos


def automorphisms(group: FiniteGroup, cap: Optional[int] = None) -> List[Monomorphism]:
    return enumerate_monomorphisms(group, group, cap)


def are_isomorphic(a: FiniteGroup, b: FiniteGroup, cap: Optional[int] = None) -> bool:
    if a.order != b.order:
        return False
    return next(iter_monomorphisms(a, b, cap), None) is not None


# ==================== WORD EQUATIONS ====================

Word = Tuple[Tuple[int, bool], ...]
_SYMBOL = re.compile(r"x(\d+)(')?")


def parse_word(text: str) -> Word:
    """``x1x2'x1`` -> ((1, False), (2, True), (1, False)); ``1`` or ``e`` is the empty word."""
    compact = text.replace(" ", "").replace("*", "")
    if compact in ("", "1", "e"):
        return ()
    letters = []
    pos = 0
    for match in _SYMBOL.finditer(compact):
        if match.start() != pos:
            break
        letters.append((int(match.group(1)), match.group(2) is not None))
        pos = match.end()
    if pos != len(compact):
        raise GroupError(f"cannot parse word {text!r} at offset {pos}")
    return tuple(letters)


@dataclass(frozen=True)
class WordSystem:
    arity: int
    equalities: Tuple[Word, ...] = field(default_factory=tuple)
    inequalities: Tuple[Word, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.arity < 1:
            raise GroupError("word system arity must be positive")
        for word in self.equalities + self.inequalities:
            for index, _ in word:
                if not 1 <= index <= self.arity:
                    raise GroupError(f"symbol x{index} outside 1..{self.arity}")

    @classmethod
    def from_text(cls, equalities: Sequence[str], inequalities: Sequence[str], arity: Optional[int] = None) -> "WordSystem":
        eq = tuple(parse_word(w) for w in equalities)
        neq = tuple(parse_word(w) for w in inequalities)
        used = [i for word in eq + neq for i, _ in word]
        return cls(arity or max(used, default=1), eq, neq)


def evaluate_word(group: FiniteGroup, word: Word, assignment: Sequence[int]) -> int:
    acc = 0
    for index, inverted in word:
        g = assignment[index - 1]
        acc = int(group.table[acc, group.inv(g) if inverted else g])
    return acc


def solves_pair(group: FiniteGroup, system: WordSystem, cap: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """Lexicographically least assignment solving every equality and no inequality."""
    cap = CONFIG["search_cap"] if cap is None else cap
    check_budget("search_cap", cap, group.order ** system.arity)
    for assignment in itertools.product(range(group.order), repeat=system.arity):
        if all(evaluate_word(group, w, assignment) == 0 for w in system.equalities) and all(
            evaluate_word(group, w, assignment) != 0 for w in system.inequalities
        ):
            return assignment
    return None


def find_free_element(group: FiniteGroup, words: Sequence[Word]) -> Optional[int]:
    """First element g (ascending) with s(g) != Id for every one-variable word s."""
    for g in range(group.order):
        if all(evaluate_word(group, w, (g,)) != 0 for w in words):
            return g
    return None
