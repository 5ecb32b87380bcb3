"""Utility helpers for consistently formatting subsets and canonical orderings."""

from typing import Iterable, List, Sequence, Tuple

from src.backend.utils.bitsets import bits, popcount

EMPTY_TOKEN = "-"


def canonical_key(mask: int) -> Tuple[int, List[int]]:
    """Order by size, then by bit positions."""
    return popcount(mask), bits(mask)


def canonical_masks(n: int) -> List[int]:
    return sorted(range(1 << n), key=canonical_key)


def format_tokens(labels: Sequence[str]) -> str:
    """Space separated labels for the text formats, ``-`` for the empty set."""
    return " ".join(labels) if labels else EMPTY_TOKEN


def parse_tokens(tokens: Sequence[str]) -> List[str]:
    if list(tokens) == [EMPTY_TOKEN]:
        return []
    return list(tokens)


def format_subset(labels: Iterable[str]) -> str:
    """Braced form used in reports, e.g. ``{a,b}``."""
    return "{" + ",".join(labels) + "}"
