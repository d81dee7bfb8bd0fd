"""Falsification by semi-lattice inclusion, and the relevant elementary statements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import (
    CIStatement,
    VarSet,
    check_cap,
    common_universe,
    enumerate_elementary,
    iter_submasks,
    semi_lattice_masks,
)


@dataclass(frozen=True)
class FalsificationResult:
    included: bool
    witness: VarSet | None = None

    def __post_init__(self):
        if self.included == (self.witness is not None):
            raise ValueError("a witness is present exactly when inclusion fails")


def lattice_indicator(stmts: Iterable[CIStatement], n: int) -> bytearray:
    """Byte per subset mask: 1 where the mask lies in the union of semi-lattices."""
    flags = bytearray(1 << n)
    for s in stmts:
        for u in semi_lattice_masks(s):
            flags[u] = 1
    return flags


def check_inclusion(antecedents: Iterable[CIStatement], consequent: CIStatement,
                    cap: int | None = None) -> FalsificationResult:
    """Test L(consequent) ⊆ L(antecedents).

    A failed inclusion proves the antecedents do not imply the consequent;
    the witness is the smallest mask in L(consequent) outside the union.
    """
    antecedents = list(antecedents)
    universe = common_universe(antecedents + [consequent])
    check_cap(universe.n, cap)
    flags = lattice_indicator(antecedents, universe.n)
    missing = [u for u in semi_lattice_masks(consequent) if not flags[u]]
    if missing:
        return FalsificationResult(False, VarSet(universe, min(missing)))
    return FalsificationResult(True)


def _interval_inside(flags: bytearray, low: int, free: int) -> bool:
    # iter_submasks starts from the largest member, which is the likeliest miss
    for sub in iter_submasks(free):
        if not flags[low | sub]:
            return False
    return True


def relevant_elementary(antecedents: Iterable[CIStatement], cap: int | None = None,
                        flags: bytearray | None = None) -> list[CIStatement]:
    """Elementary statements whose semi-lattice lies inside L(antecedents).

    Returned in :func:`enumerate_elementary` order; these are the columns of
    the validation matrix. ``flags`` may carry a precomputed
    :func:`lattice_indicator`.
    """
    antecedents = list(antecedents)
    universe = common_universe(antecedents)
    check_cap(universe.n, cap)
    if flags is None:
        flags = lattice_indicator(antecedents, universe.n)
    full = universe.full_mask
    out = []
    for r in enumerate_elementary(universe, cap=universe.n):
        # cheap necessary test before walking the whole interval
        if not flags[r.c]:
            continue
        if _interval_inside(flags, r.c, full & ~(r.a | r.b | r.c)):
            out.append(r)
    return out
