"""
Hypergraphs and matroids as explicit subset tables.

A table over ground set E has 2^|E| entries; entry X (bit i = i-th ground
label) says whether X is a hyperedge (for a matroid: independent). Rank
tables are derived once per matroid and cached.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import isprime
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from src.backend.config_loader import CONFIG
from src.backend.errors import MatroidError, check_budget
from src.backend.utils.bitsets import (
    bits,
    embedding,
    popcount,
    popcounts,
    projection,
    subset_indices,
    subset_max,
    superset_min,
    superset_or,
)

logger = logging.getLogger(__name__)

Subset = Union[int, Iterable[str]]


class Hypergraph:
    """A ground set with an arbitrary family of subsets given as a boolean table."""

    def __init__(self, ground: Sequence[str], table, max_ground: Optional[int] = None):
        self.ground: Tuple[str, ...] = tuple(ground)
        if len(set(self.ground)) != len(self.ground):
            raise MatroidError("ground labels must be unique")
        cap = CONFIG["matroid_max_ground"] if max_ground is None else max_ground
        check_budget("matroid_max_ground", cap, len(self.ground))
        arr = np.asarray(table, dtype=bool)
        if arr.shape != (1 << len(self.ground),):
            raise MatroidError(f"table must have {1 << len(self.ground)} entries, got {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.table = arr
        self._pos = {x: i for i, x in enumerate(self.ground)}

    @classmethod
    def from_sets(cls, ground: Sequence[str], members: Iterable[Iterable[str]]) -> "Hypergraph":
        table = np.zeros(1 << len(ground), dtype=bool)
        pos = {x: i for i, x in enumerate(ground)}
        for member in members:
            try:
                table[sum(1 << pos[x] for x in set(member))] = True
            except KeyError as exc:
                raise MatroidError(f"unknown element {exc.args[0]!r}") from None
        return cls(ground, table)

    @property
    def size(self) -> int:
        return len(self.ground)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def position(self, label: str) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise MatroidError(f"unknown element {label!r}") from None

    def mask(self, X: Subset) -> int:
        if isinstance(X, (int, np.integer)):
            if X < 0 or X > self.full_mask:
                raise MatroidError(f"subset mask {X} outside the ground set")
            return int(X)
        out = 0
        for label in X:
            out |= 1 << self.position(label)
        return out

    def labels(self, mask: int) -> Tuple[str, ...]:
        return tuple(self.ground[i] for i in bits(mask))

    def contains(self, X: Subset) -> bool:
        return bool(self.table[self.mask(X)])

    def hyperedges(self) -> List[int]:
        return [int(x) for x in np.flatnonzero(self.table)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.ground == other.ground and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.ground, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} |E|={self.size} members={int(self.table.sum())}>"


@dataclass(frozen=True)
class AxiomViolation:
    """First violated independence axiom with a witnessing pair of subsets."""

    axiom: str
    first: Tuple[str, ...]
    second: Tuple[str, ...]

    def describe(self) -> str:
        show = lambda s: "{" + ",".join(s) + "}"
        return f"{self.axiom} violated: {show(self.first)} / {show(self.second)}"


def _sort_key(mask: int) -> Tuple[int, List[int]]:
    return popcount(mask), bits(mask)


def _first_violation(ground: Tuple[str, ...], indep: np.ndarray) -> Optional[AxiomViolation]:
    n = len(ground)
    labels = lambda m: tuple(ground[i] for i in bits(m))
    if not indep[0]:
        members = np.flatnonzero(indep)
        witness = labels(int(members[0])) if len(members) else ()
        return AxiomViolation("empty-set", (), witness)

    idx = subset_indices(n)
    best = None
    for i in range(n):
        bit = 1 << i
        bad = np.flatnonzero(((idx & bit) != 0) & indep & ~indep[idx ^ bit])
        if len(bad):
            x = int(bad[0])
            candidate = (x, x ^ bit)
            if best is None or candidate < best:
                best = candidate
    if best is not None:
        return AxiomViolation("downward-closure", labels(best[1]), labels(best[0]))

    # A downward-closed family is a matroid exactly when its subset-max size
    # function is submodular; checking single-element steps suffices.
    rank = subset_max(np.where(indep, popcounts(n), 0).astype(np.int16), n)
    for a, b in itertools.combinations(range(n), 2):
        ba, bb = 1 << a, 1 << b
        base = idx[(idx & (ba | bb)) == 0]
        lhs = rank[base | ba] + rank[base | bb]
        rhs = rank[base | ba | bb] + rank[base]
        bad = np.flatnonzero(lhs < rhs)
        if len(bad):
            span = int(base[bad[0]]) | ba | bb
            small, large = _unequal_bases(n, indep, rank, span)
            return AxiomViolation("augmentation", labels(small), labels(large))
    return None


def _unequal_bases(n: int, indep: np.ndarray, rank: np.ndarray, span: int) -> Tuple[int, int]:
    """A maximal but not maximum independent subset of ``span``, and a maximum one."""
    idx = subset_indices(n)
    inside = np.flatnonzero(((idx & ~span) == 0) & indep)
    sizes = popcounts(n)[inside]
    target = rank[span]
    largest = int(inside[np.flatnonzero(sizes == target)[0]])
    for y in inside[sizes < target]:
        y = int(y)
        if not any(indep[y | (1 << e)] for e in bits(span & ~y)):
            return y, largest
    raise MatroidError("inconsistent rank table")  # unreachable for a failed local check


class Matroid(Hypergraph):
    """
    Matroid given by its independent sets.

    Construction validates the axioms unless ``validate=False`` is passed by a
    builder that guarantees them.
    """

    def __init__(self, ground: Sequence[str], table, validate: bool = True, max_ground: Optional[int] = None):
        super().__init__(ground, table, max_ground)
        if validate:
            violation = _first_violation(self.ground, self.table)
            if violation is not None:
                raise MatroidError(violation.describe())
        self._rank: Optional[np.ndarray] = None
        self._flats: Optional[List[int]] = None

    # ---- builders ----

    @classmethod
    def from_circuits(cls, ground: Sequence[str], circuits: Iterable[int], validate: bool = True) -> "Matroid":
        n = len(ground)
        check_budget("matroid_max_ground", CONFIG["matroid_max_ground"], n)
        dep = np.zeros(1 << n, dtype=bool)
        for c in circuits:
            dep[int(c)] = True
        return cls(ground, ~superset_or(dep, n), validate=validate)

    @classmethod
    def from_hypergraph(cls, h: Hypergraph) -> "Matroid":
        return cls(h.ground, h.table)

    # ---- rank, closure ----

    @property
    def rank_table(self) -> np.ndarray:
        if self._rank is None:
            r = subset_max(np.where(self.table, popcounts(self.size), 0).astype(np.int16), self.size)
            r.setflags(write=False)
            self._rank = r
        return self._rank

    def rank(self, X: Subset = None) -> int:
        return int(self.rank_table[self.full_mask if X is None else self.mask(X)])

    def closure(self, X: Subset) -> int:
        x = self.mask(X)
        r = self.rank_table
        out = x
        for i in range(self.size):
            if not x >> i & 1 and r[x | (1 << i)] == r[x]:
                out |= 1 << i
        return out

    def is_independent(self, X: Subset) -> bool:
        return self.contains(X)

    def loops(self) -> Tuple[str, ...]:
        return tuple(x for i, x in enumerate(self.ground) if not self.table[1 << i])

    def coloops(self) -> Tuple[str, ...]:
        full = self.rank()
        return tuple(x for i, x in enumerate(self.ground) if self.rank(self.full_mask & ~(1 << i)) < full)

    def basis(self) -> Tuple[str, ...]:
        """Greedy basis in ground order."""
        b = 0
        for i in range(self.size):
            if self.table[b | (1 << i)]:
                b |= 1 << i
        return self.labels(b)

    # ---- circuits, flats, lines ----

    def circuits(self) -> List[int]:
        idx = subset_indices(self.size)
        minimal = ~self.table
        for i in range(self.size):
            bit = 1 << i
            minimal &= ((idx & bit) == 0) | self.table[idx ^ bit]
        return sorted((int(c) for c in np.flatnonzero(minimal)), key=_sort_key)

    def flats(self, rank: Optional[int] = None) -> List[int]:
        if self._flats is None:
            idx = subset_indices(self.size)
            r = self.rank_table
            flat = np.ones(1 << self.size, dtype=bool)
            for i in range(self.size):
                bit = 1 << i
                flat &= ((idx & bit) != 0) | (r[idx | bit] > r)
            self._flats = sorted((int(f) for f in np.flatnonzero(flat)), key=_sort_key)
        if rank is None:
            return list(self._flats)
        return [f for f in self._flats if self.rank_table[f] == rank]

    def long_lines(self) -> List[int]:
        points = self.flats(1)
        return [line for line in self.flats(2) if sum(1 for p in points if p & ~line == 0) >= 4]

    def is_skew(self, X: Subset, Y: Subset) -> bool:
        x, y = self.mask(X), self.mask(Y)
        if x & y:
            raise MatroidError("skewness is defined for disjoint sets")
        return self.rank(x) + self.rank(y) == self.rank(x | y)

    def skew_by_circuits(self, X: Subset, Y: Subset) -> bool:
        """Skewness via circuits: no circuit inside X+Y meets both X and Y."""
        x, y = self.mask(X), self.mask(Y)
        if x & y:
            raise MatroidError("skewness is defined for disjoint sets")
        return not any(c & ~(x | y) == 0 and c & x and c & y for c in self.circuits())

    def is_modular(self) -> bool:
        r = self.rank_table
        flats = self.flats()
        for f, g in itertools.combinations(flats, 2):
            if r[f] + r[g] != r[f | g] + r[f & g]:
                return False
        return True

    # ---- derived matroids ----

    def restriction(self, X: Union[int, Sequence[str]]) -> "Matroid":
        """M|X; a label sequence fixes the ground order of the result."""
        if isinstance(X, (int, np.integer)):
            labels = self.labels(int(X))
        else:
            labels = tuple(X)
        positions = [self.position(x) for x in labels]
        if len(set(positions)) != len(positions):
            raise MatroidError("restriction labels repeat")
        emb = embedding(positions, self.size)
        return Matroid(labels, self.table[emb], validate=False)

    def relabel(self, mapping: Mapping[str, str]) -> "Matroid":
        return Matroid([mapping.get(x, x) for x in self.ground], self.table, validate=False)


# ==================== OPERATIONS ====================

def validate_matroid(h: Hypergraph) -> Union[Matroid, AxiomViolation]:
    """Return the matroid, or the first violated axiom with its witnesses."""
    violation = _first_violation(h.ground, h.table)
    if violation is not None:
        logger.debug(f"hypergraph rejected: {violation.describe()}")
        return violation
    return Matroid(h.ground, h.table, validate=False)


def rank_closure(m: Matroid, X: Subset) -> Tuple[int, Tuple[str, ...]]:
    return m.rank(X), m.labels(m.closure(X))


def circuits_lines(m: Matroid) -> Tuple[List[Tuple[str, ...]], List[Tuple[str, ...]]]:
    return [m.labels(c) for c in m.circuits()], [m.labels(f) for f in m.long_lines()]


def uniform(rank: int, labels: Sequence[str]) -> Matroid:
    if not 0 <= rank <= len(labels):
        raise MatroidError(f"uniform matroid needs 0 <= r <= n, got r={rank}, n={len(labels)}")
    return Matroid(labels, popcounts(len(labels)) <= rank, validate=False)


def direct_sum(m1: Matroid, m2: Matroid) -> Matroid:
    overlap = set(m1.ground) & set(m2.ground)
    if overlap:
        raise MatroidError(f"direct sum needs disjoint ground sets, shared: {sorted(overlap)}")
    check_budget("matroid_max_ground", CONFIG["matroid_max_ground"], m1.size + m2.size)
    table = np.logical_and.outer(m2.table, m1.table).ravel()
    return Matroid(m1.ground + m2.ground, table, validate=False)


def two_sum(m1: Matroid, m2: Matroid, basepoint: str) -> Matroid:
    """2-sum along a shared basepoint that is neither a loop nor a coloop on either side."""
    shared = set(m1.ground) & set(m2.ground)
    if shared != {basepoint}:
        raise MatroidError(f"2-sum needs exactly the basepoint in common, shared: {sorted(shared)}")
    for m in (m1, m2):
        if basepoint in m.loops() or basepoint in m.coloops():
            raise MatroidError(f"basepoint {basepoint} is a loop or coloop")
    left = [x for x in m1.ground if x != basepoint]
    right = [x for x in m2.ground if x != basepoint]
    ground = left + right
    pos = {x: i for i, x in enumerate(ground)}
    through1, through2, circuits = [], [], []
    for m, through in ((m1, through1), (m2, through2)):
        for c in m.circuits():
            labels = [x for x in m.labels(c) if x != basepoint]
            mask = sum(1 << pos[x] for x in labels)
            if basepoint in m.labels(c):
                through.append(mask)
            else:
                circuits.append(mask)
    circuits.extend(a | b for a in through1 for b in through2)
    return Matroid.from_circuits(ground, circuits, validate=False)


def linear_matroid(vectors: Sequence[Tuple[str, Sequence[int]]], p: int) -> Matroid:
    """Matroid of labelled vectors over GF(p)."""
    if not isprime(p):
        raise MatroidError(f"{p} is not prime")
    labels = [label for label, _ in vectors]
    n = len(labels)
    check_budget("matroid_max_ground", CONFIG["matroid_max_ground"], n)
    dim = len(vectors[0][1]) if vectors else 0
    field = GF(p)
    rows = [[field(int(x) % p) for x in vec] for _, vec in vectors]
    table = np.zeros(1 << n, dtype=bool)
    table[0] = True
    # a set is independent iff it is small enough and its rows have full rank
    for size in range(1, min(n, dim) + 1):
        for combo in itertools.combinations(range(n), size):
            mat = DomainMatrix([rows[i] for i in combo], (size, dim), field)
            if mat.rank() == size:
                table[sum(1 << i for i in combo)] = True
    return Matroid(labels, table, validate=False)


def projective_points(p: int) -> List[Tuple[int, int, int]]:
    """Normalized representatives: first non-zero coordinate equal to 1."""
    points = []
    for vec in itertools.product(range(p), repeat=3):
        nonzero = [x for x in vec if x]
        if nonzero and nonzero[0] == 1:
            points.append(vec)
    return points


def projective_plane(p: int) -> Matroid:
    if not isprime(p):
        raise MatroidError(f"projective planes are built over prime fields only, got {p}")
    count = p * p + p + 1
    check_budget("matroid_max_ground", CONFIG["matroid_max_ground"], count)
    points = projective_points(p)
    m = linear_matroid([("".join(map(str, v)), v) for v in points], p)
    logger.info(f"PG(2,{p}) built on {m.size} points")
    return m


def combine(kind: str, *args) -> Matroid:
    if kind == "restriction":
        m, X = args
        return m.restriction(X)
    if kind == "direct_sum":
        return direct_sum(*args)
    if kind == "two_sum":
        return two_sum(*args)
    raise MatroidError(f"unknown combine kind {kind!r}")


# ==================== AMALGAMS ====================

def amalgam_base(m1: Matroid, m2: Matroid) -> Tuple[str, ...]:
    """Shared labels, in the first matroid's ground order."""
    other = set(m2.ground)
    return tuple(x for x in m1.ground if x in other)


def _check_amalgam_inputs(m1: Matroid, m2: Matroid) -> Tuple[Tuple[str, ...], Matroid]:
    base = amalgam_base(m1, m2)
    n1, n2 = m1.restriction(base), m2.restriction(base)
    if n1 != n2:
        raise MatroidError(f"the two matroids restrict differently to the shared set {base}")
    if not n1.is_modular():
        raise MatroidError(f"the shared restriction on {base} is not modular")
    return base, n1


def proper_amalgam(m1: Matroid, m2: Matroid) -> Matroid:
    """Proper amalgam over the shared ground, ground order E1 then E2 minus the base."""
    base, shared = _check_amalgam_inputs(m1, m2)
    ground = m1.ground + tuple(x for x in m2.ground if x not in set(base))
    n = len(ground)
    check_budget("matroid_max_ground", CONFIG["matroid_max_ground"], n)
    pos = {x: i for i, x in enumerate(ground)}

    p1 = projection([pos[x] for x in m1.ground], n)
    p2 = projection([pos[x] for x in m2.ground], n)
    pn = projection([pos[x] for x in base], n)
    bound = (
        m1.rank_table[p1].astype(np.int32)
        + m2.rank_table[p2].astype(np.int32)
        - shared.rank_table[pn].astype(np.int32)
    )
    rank = superset_min(bound, n)
    amalgam = Matroid(ground, rank == popcounts(n), validate=False)
    amalgam._rank = rank.astype(np.int16)
    amalgam._rank.setflags(write=False)
    logger.info(f"proper amalgam on {n} elements over base {base}, rank {int(rank[-1])}")
    return amalgam


@dataclass(frozen=True)
class AmalgamVerdict:
    dependent: bool
    case: str  # side-dependence | i | ii | iii | none


def dependence_cases(m1: Matroid, m2: Matroid, X: Iterable[str]) -> AmalgamVerdict:
    """Decide dependence in the proper amalgam from the two sides alone (rank-2 base)."""
    base = amalgam_base(m1, m2)
    if m1.restriction(base) != m2.restriction(base):
        raise MatroidError(f"the two matroids restrict differently to the shared set {base}")
    if m1.rank(base) != 2:
        raise MatroidError(f"the shared set must have rank 2, it has rank {m1.rank(base)}")
    X = set(X)
    unknown = X - set(m1.ground) - set(m2.ground)
    if unknown:
        raise MatroidError(f"unknown elements {sorted(unknown)}")

    e1, e2, ell = set(m1.ground), set(m2.ground), set(base)
    x1, x2 = m1.mask(X & e1), m2.mask(X & e2)
    if not m1.table[x1] or not m2.table[x2]:
        return AmalgamVerdict(True, "side-dependence")

    only1 = m1.mask(X - e2)
    only2 = m2.mask(X - e1)
    base1, base2 = m1.mask(ell), m2.mask(ell)
    if base1 & ~m1.closure(x1) == 0 and not m2.is_skew(only2, base2):
        return AmalgamVerdict(True, "i")
    if base2 & ~m2.closure(x2) == 0 and not m1.is_skew(only1, base1):
        return AmalgamVerdict(True, "ii")
    common = set(m1.labels(m1.closure(only1))) & set(m2.labels(m2.closure(only2)))
    loops = set(m1.loops())
    if any(y not in loops for y in common):
        return AmalgamVerdict(True, "iii")
    return AmalgamVerdict(False, "none")
