"""
Encoders that turn matroid constructions into coloured systems and complements.

Each encoder pair reproduces one matroid operation as a coloured sum:
direct sums (basic + direct_sum_complement), 2-sums along a basepoint, and
proper amalgams over a rank-2 modular base.
"""

import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np

from src.backend.errors import ColouredError
from src.backend.coloured.systems import ColouredComplement, ColouredSystem
from src.backend.matroids.matroid import Matroid, amalgam_base
from src.backend.utils.bitsets import embedding, popcounts

logger = logging.getLogger(__name__)

DEPENDENT = "1"
INDEPENDENT = "2"
BINARY_COLOURS = (DEPENDENT, INDEPENDENT)
TWO_SUM_COLOURS = ("1", "2", "3")


def basic(m: Matroid) -> ColouredSystem:
    """Dependent sets coloured 1, independent sets 2."""
    return ColouredSystem(m.ground, BINARY_COLOURS, m.table.astype(np.int32))


def direct_sum_complement(n: Matroid) -> ColouredComplement:
    """Accept (Y, 2) for Y independent in n; with basic() this encodes the direct sum."""
    table = np.zeros((1 << n.size, 2), dtype=bool)
    table[:, 1] = n.table
    return ColouredComplement(n.ground, BINARY_COLOURS, table)


def _check_basepoint(m: Matroid, p: str) -> None:
    if p not in m.ground:
        raise ColouredError(f"basepoint {p} is not in the ground set")
    if p in m.loops() or p in m.coloops():
        raise ColouredError(f"basepoint {p} is a loop or coloop")


def _without(m: Matroid, p: str) -> Tuple[Tuple[str, ...], np.ndarray, np.ndarray]:
    """Ground minus p, and for each subset X of it: the mask of X in m, and X + p."""
    rest = tuple(x for x in m.ground if x != p)
    emb = embedding([m.position(x) for x in rest], m.size)
    return rest, emb, emb | (1 << m.position(p))


def two_sum(m: Matroid, n: Matroid, p: str) -> Tuple[ColouredSystem, ColouredComplement]:
    """
    [3]-coloured system of m - p and its complement from n - p.

    Colours: 1 dependent, 2 independent and spanning p, 3 otherwise. The
    complement accepts independent Y with colour 3, and with colour 2 when Y
    does not span p.
    """
    _check_basepoint(m, p)
    _check_basepoint(n, p)
    shared = set(m.ground) & set(n.ground)
    if shared != {p}:
        raise ColouredError(f"2-sum needs exactly the basepoint in common, shared: {sorted(shared)}")

    rest_m, x_m, xp_m = _without(m, p)
    rank_m = m.rank_table
    spans_m = rank_m[xp_m] == rank_m[x_m]
    colour = np.where(~m.table[x_m], 0, np.where(spans_m, 1, 2))
    system = ColouredSystem(rest_m, TWO_SUM_COLOURS, colour)

    rest_n, x_n, xp_n = _without(n, p)
    rank_n = n.rank_table
    indep = n.table[x_n]
    spans_n = rank_n[xp_n] == rank_n[x_n]
    table = np.zeros((len(x_n), 3), dtype=bool)
    table[:, 1] = indep & ~spans_n
    table[:, 2] = indep
    return system, ColouredComplement(rest_n, TWO_SUM_COLOURS, table)


# ==================== AMALGAMS ====================

def _check_amalgam_base(m: Matroid, base: Sequence[str]) -> Tuple[str, ...]:
    base = tuple(base)
    missing = [x for x in base if x not in m.ground]
    if missing:
        raise ColouredError(f"base elements {missing} are not in the ground set")
    restricted = m.restriction(base)
    if m.rank(base) != 2:
        raise ColouredError(f"the base must have rank 2, it has rank {m.rank(base)}")
    if not restricted.is_modular():
        raise ColouredError(f"the restriction to the base {base} is not modular")
    return base


def _token(labels: Sequence[str]) -> str:
    return ",".join(labels) if labels else "-"


def amalgam_colour_name(base: Sequence[str], A: int, B: int, dep: bool, skew: bool, L: int) -> str:
    """Colour token 'A/B/dep/skew/L' with base subsets written as label lists ('-' when empty)."""
    show = lambda mask: _token([x for i, x in enumerate(base) if mask >> i & 1])  # noqa: E731
    return f"{show(A)}/{show(B)}/{int(dep)}/{int(skew)}/{show(L)}"


def amalgam_colours(base: Sequence[str]) -> List[str]:
    """Every colour an amalgam-side system on this base can use, in tuple order."""
    k = len(base)
    return [
        amalgam_colour_name(base, A, B, dep, skew, L)
        for A, B, dep, skew, L in itertools.product(range(1 << k), range(1 << k), (False, True), (False, True), range(1 << k))
    ]


def amalgam_side(m1: Matroid, base: Sequence[str]) -> ColouredSystem:
    """
    System on the ground of m1 colouring X by (cl(X) on the base, cl(X - base) on the base,
    dependent?, X - base skew to the base?, closure of X on the base inside the base).

    Only the colours that occur are kept, in the order of amalgam_colours.
    """
    base = _check_amalgam_base(m1, base)
    bpos = [m1.position(x) for x in base]
    n = m1.size
    base_mask = sum(1 << p for p in bpos)
    to_base = lambda full: sum(1 << j for j, p in enumerate(bpos) if full >> p & 1)  # noqa: E731
    restricted = m1.restriction(base)
    r = m1.rank_table
    r_base = int(r[base_mask])

    raw = []
    for X in range(1 << n):
        outside = X & ~base_mask
        A = to_base(m1.closure(X))
        B = to_base(m1.closure(outside))
        dep = not m1.table[X]
        skew = int(r[outside]) + r_base == int(r[outside | base_mask])
        L = restricted.closure(to_base(X & base_mask))
        raw.append((A, B, dep, skew, L))

    used = sorted(set(raw), key=lambda c: (c[0], c[1], c[2], c[3], c[4]))
    names = [amalgam_colour_name(base, *c) for c in used]
    index = {c: i for i, c in enumerate(used)}
    logger.debug(f"amalgam side on {n} elements uses {len(used)} colours")
    return ColouredSystem(m1.ground, names, [index[c] for c in raw], max_colours=len(names))


def _parse_colour(base: Tuple[str, ...], name: str) -> Tuple[int, int, bool, bool, int]:
    pos = {x: i for i, x in enumerate(base)}
    try:
        a, b, dep, skew, l_part = name.split("/")
        read = lambda part: 0 if part == "-" else sum(1 << pos[x] for x in part.split(","))  # noqa: E731
        return read(a), read(b), dep == "1", skew == "1", read(l_part)
    except (KeyError, ValueError):
        raise ColouredError(f"colour {name!r} is not an amalgam colour over {base}") from None


def amalgam_complement(m2: Matroid, base: Sequence[str], colours: Sequence[str]) -> ColouredComplement:
    """
    Complement on the ground of m2 minus the base accepting (Y, t) exactly when
    X + Y is independent in the proper amalgam for any X of colour t.
    """
    base = _check_amalgam_base(m2, base)
    rest = tuple(x for x in m2.ground if x not in set(base))
    bpos = [m2.position(x) for x in base]
    base_mask = sum(1 << p for p in bpos)
    from_base = embedding(bpos, m2.size)
    y_full = embedding([m2.position(x) for x in rest], m2.size)
    r = m2.rank_table
    restricted = m2.restriction(base)
    r_base = int(r[base_mask])
    nonloops = [i for i in range(len(base)) if restricted.table[1 << i]]
    sizes = popcounts(len(rest))

    table = np.zeros((1 << len(rest), len(colours)), dtype=bool)
    for ci, name in enumerate(colours):
        A, B, dep, skew, L = _parse_colour(base, name)
        if dep:
            continue
        L_full = int(from_base[L])
        r_L = int(restricted.rank_table[L])
        for y in range(1 << len(rest)):
            Y = int(y_full[y])
            if int(r[L_full | Y]) != r_L + int(sizes[y]):
                continue
            y_skew = int(r[Y]) + r_base == int(r[Y | base_mask])
            if A == restricted.full_mask and not y_skew:
                continue
            if m2.closure(L_full | Y) & base_mask == base_mask and not skew:
                continue
            common = B & sum(1 << j for j, p in enumerate(bpos) if m2.closure(Y) >> p & 1)
            if any(common >> j & 1 for j in nonloops):
                continue
            table[y, ci] = True
    return ColouredComplement(rest, colours, table, max_colours=len(colours))


def amalgam_pair(m1: Matroid, m2: Matroid) -> Tuple[ColouredSystem, ColouredComplement]:
    """Encoder pair whose coloured sum is the proper amalgam of m1 and m2 over their shared base."""
    base = amalgam_base(m1, m2)
    system = amalgam_side(m1, base)
    return system, amalgam_complement(m2, base, system.colours)


def encode(kind: str, *args):
    if kind == "basic":
        return basic(*args)
    if kind == "two_sum":
        return two_sum(*args)
    if kind == "amalgam_side":
        return amalgam_side(*args)
    if kind == "amalgam_complement":
        return amalgam_complement(*args)
    if kind == "direct_sum_complement":
        return direct_sum_complement(*args)
    raise ColouredError(f"unknown encoder {kind!r}")
