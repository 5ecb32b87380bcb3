"""
Counting monadic second-order formulas over hypergraphs.

Variables are set variables Z1, Z2, ... stored by their index. Every node
checks its construction rule when it is built, so a Formula value is always
well formed; Var, Free and Bound are computed once per node.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet

from src.backend.config_loader import CONFIG
from src.backend.errors import FormulaError


def _check_var(i: int) -> None:
    limit = CONFIG["formula_max_var"]
    if not 1 <= i <= limit:
        raise FormulaError(f"variable Z{i} outside Z1..Z{limit}", rule="variable-range")


class Formula:
    """Base node; subclasses define ``var`` and ``free``."""

    kind = "formula"

    @cached_property
    def bound(self) -> FrozenSet[int]:
        return self.var - self.free

    @property
    def is_sentence(self) -> bool:
        return not self.free

    def confined(self, delta: int) -> bool:
        return self.min_delta <= delta

    def render(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Subset(Formula):
    left: int
    right: int
    kind = "subset"

    def __post_init__(self):
        _check_var(self.left)
        _check_var(self.right)

    @cached_property
    def var(self) -> FrozenSet[int]:
        return frozenset((self.left, self.right))

    @cached_property
    def free(self) -> FrozenSet[int]:
        return self.var

    min_delta = 1
    size = 1

    def render(self) -> str:
        return f"Z{self.left} <= Z{self.right}"


@dataclass(frozen=True)
class Hyp(Formula):
    index: int
    kind = "hyp"

    def __post_init__(self):
        _check_var(self.index)

    @cached_property
    def var(self) -> FrozenSet[int]:
        return frozenset((self.index,))

    @cached_property
    def free(self) -> FrozenSet[int]:
        return self.var

    min_delta = 1
    size = 1

    def render(self) -> str:
        return f"hyp(Z{self.index})"


@dataclass(frozen=True)
class Count(Formula):
    """|Zi| = p mod q with q > 1 and 0 <= p < q."""

    index: int
    p: int
    q: int
    kind = "count"

    def __post_init__(self):
        _check_var(self.index)
        if self.q <= 1 or not 0 <= self.p < self.q:
            raise FormulaError(f"counting atom needs q > 1 and 0 <= p < q, got p={self.p}, q={self.q}", rule="count")

    @cached_property
    def var(self) -> FrozenSet[int]:
        return frozenset((self.index,))

    @cached_property
    def free(self) -> FrozenSet[int]:
        return self.var

    @property
    def min_delta(self) -> int:
        return self.q

    size = 1

    def render(self) -> str:
        return f"|Z{self.index}| = {self.p} mod {self.q}"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula
    kind = "not"

    @cached_property
    def var(self) -> FrozenSet[int]:
        return self.child.var

    @cached_property
    def free(self) -> FrozenSet[int]:
        return self.child.free

    @cached_property
    def min_delta(self) -> int:
        return self.child.min_delta

    @cached_property
    def size(self) -> int:
        return 1 + self.child.size

    def render(self) -> str:
        inner = self.child.render()
        if isinstance(self.child, (And, Exists)):
            inner = f"({inner})"
        return f"~{inner}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula
    kind = "and"

    def __post_init__(self):
        for mine, other, side in ((self.left, self.right, "left"), (self.right, self.left, "right")):
            clash = mine.bound & other.free
            if clash:
                names = ", ".join(f"Z{i}" for i in sorted(clash))
                raise FormulaError(
                    f"conjunction clash: {names} bound on the {side} and free on the other side",
                    rule="and-disjointness",
                )

    @cached_property
    def var(self) -> FrozenSet[int]:
        return self.left.var | self.right.var

    @cached_property
    def free(self) -> FrozenSet[int]:
        return self.left.free | self.right.free

    @cached_property
    def min_delta(self) -> int:
        return max(self.left.min_delta, self.right.min_delta)

    @cached_property
    def size(self) -> int:
        return 1 + self.left.size + self.right.size

    def render(self) -> str:
        left = self.left.render()
        if isinstance(self.left, Exists):
            left = f"({left})"
        right = self.right.render()
        if isinstance(self.right, (And, Exists)):
            right = f"({right})"
        return f"{left} & {right}"


@dataclass(frozen=True)
class Exists(Formula):
    index: int
    child: Formula
    kind = "exists"

    def __post_init__(self):
        _check_var(self.index)
        if self.index not in self.child.free:
            raise FormulaError(f"Z{self.index} is not free in the quantified formula", rule="exists-free")

    @cached_property
    def var(self) -> FrozenSet[int]:
        return self.child.var

    @cached_property
    def free(self) -> FrozenSet[int]:
        return self.child.free - {self.index}

    @cached_property
    def min_delta(self) -> int:
        return self.child.min_delta

    @cached_property
    def size(self) -> int:
        return 1 + self.child.size

    def render(self) -> str:
        return f"exists Z{self.index} {self.child.render()}"


def render(f: Formula) -> str:
    return f.render()
