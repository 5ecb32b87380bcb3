"""
Coloured systems, their complements, and coloured sums.

A system (U, c) colours every subset of U; a complement (V, d) accepts or
rejects each (subset of V, colour) pair. Colours are stored by index into the
ordered colour tuple shared by both sides.
"""

import logging
from typing import Callable, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.backend.config_loader import CONFIG
from src.backend.errors import ColouredError, check_budget
from src.backend.matroids.matroid import Hypergraph
from src.backend.utils.bitsets import bits

logger = logging.getLogger(__name__)


def _labels_mask(ground: Tuple[str, ...], pos: Mapping[str, int], X) -> int:
    if isinstance(X, (int, np.integer)):
        if X < 0 or X >= 1 << len(ground):
            raise ColouredError(f"subset mask {X} outside the ground set")
        return int(X)
    out = 0
    for label in X:
        if label not in pos:
            raise ColouredError(f"unknown element {label!r}")
        out |= 1 << pos[label]
    return out


class _Grounded:
    def __init__(self, ground: Sequence[str], colours: Sequence[str], max_ground: int, max_colours: int):
        self.ground: Tuple[str, ...] = tuple(ground)
        self.colours: Tuple[str, ...] = tuple(colours)
        if len(set(self.ground)) != len(self.ground):
            raise ColouredError("ground labels must be unique")
        if not self.colours:
            raise ColouredError("a colour set must be non-empty")
        if len(set(self.colours)) != len(self.colours):
            raise ColouredError("colour names must be unique")
        check_budget(self._ground_cap, max_ground, len(self.ground))
        check_budget("system_max_colours", max_colours, len(self.colours))
        self._pos = {x: i for i, x in enumerate(self.ground)}
        self._colour_pos = {c: i for i, c in enumerate(self.colours)}

    _ground_cap = "system_max_ground"

    @property
    def size(self) -> int:
        return len(self.ground)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def mask(self, X) -> int:
        return _labels_mask(self.ground, self._pos, X)

    def labels(self, mask: int) -> Tuple[str, ...]:
        return tuple(self.ground[i] for i in bits(mask))

    def colour_index(self, colour) -> int:
        if isinstance(colour, (int, np.integer)) and not isinstance(colour, bool):
            if not 0 <= colour < len(self.colours):
                raise ColouredError(f"colour index {colour} out of range")
            return int(colour)
        try:
            return self._colour_pos[colour]
        except KeyError:
            raise ColouredError(f"unknown colour {colour!r}") from None


class ColouredSystem(_Grounded):
    """
    Coloured system (U, c).

    Args:
        ground: labels of U
        colours: ordered colour names
        table: colour index of every subset mask of U
        max_colours: colour cap, CONFIG system_max_colours unless a builder passes its own
    """

    def __init__(self, ground: Sequence[str], colours: Sequence[str], table, max_colours: Optional[int] = None):
        super().__init__(
            ground,
            colours,
            CONFIG["system_max_ground"],
            CONFIG["system_max_colours"] if max_colours is None else max_colours,
        )
        arr = np.asarray(table, dtype=np.int32)
        if arr.shape != (1 << self.size,):
            raise ColouredError(f"colour table must have {1 << self.size} entries, got {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= len(self.colours)):
            raise ColouredError("colour table refers to a colour outside the colour set")
        arr = arr.copy()
        arr.setflags(write=False)
        self.table = arr

    @classmethod
    def from_function(cls, ground: Sequence[str], colours: Sequence[str], fn: Callable[[int], object], max_colours: Optional[int] = None) -> "ColouredSystem":
        """Build from fn(mask) returning a colour name or index."""
        colours = tuple(colours)
        pos = {c: i for i, c in enumerate(colours)}
        table = []
        for X in range(1 << len(ground)):
            value = fn(X)
            table.append(value if isinstance(value, (int, np.integer)) and not isinstance(value, bool) else pos[value])
        return cls(ground, colours, table, max_colours=max_colours)

    def colour(self, X) -> str:
        return self.colours[int(self.table[self.mask(X)])]

    def relabel(self, mapping: Mapping[str, str]) -> "ColouredSystem":
        return ColouredSystem([mapping.get(x, x) for x in self.ground], self.colours, self.table, max_colours=len(self.colours))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColouredSystem):
            return NotImplemented
        return self.ground == other.ground and self.colours == other.colours and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.ground, self.colours, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"<ColouredSystem |U|={self.size} |C|={len(self.colours)}>"


class ColouredComplement(_Grounded):
    """
    Coloured complement (V, d); ``table[Y, i]`` is d(Y, colour i).
    """

    _ground_cap = "complement_max_ground"

    def __init__(self, ground: Sequence[str], colours: Sequence[str], table, max_colours: Optional[int] = None):
        super().__init__(
            ground,
            colours,
            CONFIG["complement_max_ground"],
            CONFIG["system_max_colours"] if max_colours is None else max_colours,
        )
        arr = np.asarray(table, dtype=bool)
        want = (1 << self.size, len(self.colours))
        if arr.shape != want:
            raise ColouredError(f"acceptance table must have shape {want}, got {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.table = arr

    @classmethod
    def from_accepted(cls, ground: Sequence[str], colours: Sequence[str], accepted: Iterable[Tuple[object, object]], max_colours: Optional[int] = None) -> "ColouredComplement":
        """Build from the (subset, colour) pairs mapped to 1; subsets as label collections or masks."""
        empty = cls(ground, colours, np.zeros((1 << len(ground), len(colours)), dtype=bool), max_colours=max_colours)
        table = np.zeros_like(empty.table)
        for Y, colour in accepted:
            table[empty.mask(Y), empty.colour_index(colour)] = True
        return cls(ground, colours, table, max_colours=max_colours)

    def accepts(self, Y, colour) -> bool:
        return bool(self.table[self.mask(Y), self.colour_index(colour)])

    def accepted(self):
        """(subset labels, colour) pairs mapped to 1, in (subset, colour) index order."""
        return [(self.labels(int(y)), self.colours[int(i)]) for y, i in zip(*np.nonzero(self.table))]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColouredComplement):
            return NotImplemented
        return self.ground == other.ground and self.colours == other.colours and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.ground, self.colours, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"<ColouredComplement |V|={self.size} |C|={len(self.colours)}>"


def coloured_sum(m: ColouredSystem, pi: ColouredComplement) -> Hypergraph:
    """Hypergraph on U then V whose hyperedges are the X+Y with d(Y, c(X)) = 1."""
    overlap = set(m.ground) & set(pi.ground)
    if overlap:
        raise ColouredError(f"system and complement share ground elements {sorted(overlap)}")
    if m.colours != pi.colours:
        raise ColouredError(f"colour sets differ: {m.colours} vs {pi.colours}")
    # rows Y, columns X; flattening gives index Y * 2^|U| + X = X | Y << |U|
    table = pi.table[:, m.table].ravel()
    return Hypergraph(m.ground + pi.ground, table)
