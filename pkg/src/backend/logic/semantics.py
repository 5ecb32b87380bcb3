"""Satisfaction of formulas on hypergraphs and the registry-count bound."""

import logging
import math
from typing import Dict, Iterable, Mapping, Optional, Union

from src.backend.config_loader import CONFIG
from src.backend.errors import BudgetExceeded, FormulaError
from src.backend.logic.formula import And, Count, Exists, Formula, Hyp, Not, Subset
from src.backend.matroids.matroid import Hypergraph
from src.backend.utils.bitsets import popcount

logger = logging.getLogger(__name__)

Interpretation = Dict[int, int]


def interpretation(h: Hypergraph, assignment: Mapping[int, Union[int, Iterable[str]]]) -> Interpretation:
    """Normalize variable images (masks or label collections) to masks over h's ground."""
    return {int(i): h.mask(X) for i, X in assignment.items()}


def _check_domain(f: Formula, theta: Mapping[int, int]) -> None:
    if set(theta) != set(f.free):
        want = ", ".join(f"Z{i}" for i in sorted(f.free)) or "nothing"
        got = ", ".join(f"Z{i}" for i in sorted(theta)) or "nothing"
        raise FormulaError(f"interpretation must assign exactly {want}, got {got}", rule="interpretation")


def satisfies(h: Hypergraph, f: Formula, theta: Optional[Mapping] = None) -> bool:
    """
    Decide whether (h, theta) satisfies f.

    Args:
        h: hypergraph (a Matroid is the hypergraph of its independent sets)
        f: formula
        theta: images of Free(f), as masks or label collections; omit for sentences

    Returns:
        True when the interpretation satisfies the formula
    """
    theta = interpretation(h, theta or {})
    _check_domain(f, theta)
    return _sat(h, f, theta)


def _sat(h: Hypergraph, f: Formula, theta: Mapping[int, int]) -> bool:
    if isinstance(f, Hyp):
        return bool(h.table[theta[f.index]])
    if isinstance(f, Subset):
        return theta[f.left] & ~theta[f.right] == 0
    if isinstance(f, Count):
        return popcount(theta[f.index]) % f.q == f.p
    if isinstance(f, Not):
        return not _sat(h, f.child, theta)
    if isinstance(f, And):
        left = {i: theta[i] for i in f.left.free}
        if not _sat(h, f.left, left):
            return False
        return _sat(h, f.right, {i: theta[i] for i in f.right.free})
    if isinstance(f, Exists):
        extended = dict(theta)
        for X in range(h.full_mask + 1):
            extended[f.index] = X
            if _sat(h, f.child, extended):
                return True
        return False
    raise FormulaError(f"unknown formula node {type(f).__name__}")


def lambda_bound(f: Formula, s: int, t: int, delta: int) -> int:
    """
    Upper bound on the number of registry values for formula f.

    Args:
        f: formula, delta-confined
        s: number of variables in play, at least |Var(f)|
        t: number of colours
        delta: confinement parameter

    Returns:
        exact integer bound
    """
    if not f.confined(delta):
        raise FormulaError(f"formula needs delta >= {f.min_delta}, got {delta}", rule="delta-confined")
    if s < len(f.var):
        raise FormulaError(f"s must be at least |Var| = {len(f.var)}, got {s}", rule="lambda-arity")
    if t < 1:
        raise FormulaError(f"t must be positive, got {t}", rule="lambda-arity")
    value = _lambda(f, s, t, delta, CONFIG["lambda_max_bits"])
    logger.debug(f"lambda bound for {f.render()} at s={s}, t={t}, delta={delta} has {value.bit_length()} bits")
    return value


def _lambda(f: Formula, s: int, t: int, delta: int, cap: int) -> int:
    if isinstance(f, Count):
        value = math.factorial(delta) ** s
    elif isinstance(f, Hyp):
        value = t ** s
    elif isinstance(f, Subset):
        value = 2 ** (s * s)
    elif isinstance(f, Not):
        value = _lambda(f.child, s, t, delta, cap)
    elif isinstance(f, And):
        value = _lambda(f.left, s, t, delta, cap) * _lambda(f.right, s, t, delta, cap)
    elif isinstance(f, Exists):
        inner = _lambda(f.child, s, t, delta, cap)
        if inner + 1 > cap:
            raise BudgetExceeded("lambda_max_bits", cap, inner + 1)
        value = 1 << inner
    else:
        raise FormulaError(f"unknown formula node {type(f).__name__}")
    if value.bit_length() > cap:
        raise BudgetExceeded("lambda_max_bits", cap, value.bit_length())
    return value
