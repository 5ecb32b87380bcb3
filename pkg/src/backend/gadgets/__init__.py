from typing import List, Optional, Sequence

from src.backend.algebra.groups import FiniteGroup
from src.backend.errors import GadgetError
from src.backend.gadgets.base import DaggerParams, DesignatedCycle, Gadget
from src.backend.gadgets.diagonal import DiagonalPair, diagonal_pair
from src.backend.gadgets.h_family import (
    build_h_gadget,
    closing_cycle_lengths,
    designated_h_cycles,
    find_h_params,
    minimal_balanced_letters,
)
from src.backend.gadgets.lambda_family import build_lambda_gadget, designated_lambda_cycles, find_lambda_params


def find_dagger_params(
    group: FiniteGroup,
    gens: Optional[Sequence[int]] = None,
    N: Optional[int] = None,
    gammas: Optional[Sequence[Sequence[int]]] = None,
    star_only: bool = False,
) -> Optional[DaggerParams]:
    """H-family search when gens and N are given, Λ-family search when gammas = (Γ1, Γ2) is."""
    if gammas is not None:
        gamma1, gamma2 = gammas
        return find_lambda_params(group, gamma1, gamma2, star_only)
    if gens is None or N is None:
        raise GadgetError("give either gens and N, or gammas")
    return find_h_params(group, gens, N, star_only)


def designated_cycles(gadget: Gadget) -> List[DesignatedCycle]:
    if gadget.family == "h":
        return designated_h_cycles(gadget)
    return designated_lambda_cycles(gadget)


__all__ = [
    "DaggerParams",
    "DesignatedCycle",
    "DiagonalPair",
    "Gadget",
    "build_h_gadget",
    "build_lambda_gadget",
    "closing_cycle_lengths",
    "designated_cycles",
    "diagonal_pair",
    "find_dagger_params",
    "minimal_balanced_letters",
]
