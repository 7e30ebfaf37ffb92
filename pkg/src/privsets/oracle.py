"""Exhaustive reference solutions for small instances.

Used to check the heuristic search: every permissible design of a given size
is enumerated by depth-first search over the grid in lexicographic order,
pruning with the set of points still admissible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from .criteria import CriterionSpec, make_objective
from .errors import EnumerationTooLarge, InfeasibleDesign
from .grid import GridSpace, enumerate_grid, region_mask
from .privacy import Design, PrivacySpec, conflict_matrix


@dataclass(frozen=True)
class EnumerationLimit:
    max_designs: int = 10_000_000


def enumerate_permissible(space: GridSpace, spec: PrivacySpec, N: int,
                          limit: EnumerationLimit = EnumerationLimit()) -> Iterator[Design]:
    """Yield every permissible design with exactly ``N`` points, lexicographically.

    The search visits at most ``limit.max_designs`` tree nodes before raising
    :class:`EnumerationTooLarge`.
    """
    spec.check_space(space)
    if space.size > limit.max_designs:
        raise EnumerationTooLarge(f"grid of {space.size} points is too large to enumerate")
    grid = enumerate_grid(space)
    grid = grid[region_mask(space, grid)]
    n = len(grid)
    if n > 5000:
        raise EnumerationTooLarge(f"{n} in-region grid points is too many for the oracle")
    # clash[i, j]: grid point j lies in the privacy set of grid point i
    clash = conflict_matrix(spec, grid, grid)
    clash |= clash.T
    nodes = 0
    chosen = []

    def rec(start, avail):
        nonlocal nodes
        nodes += 1
        if nodes > limit.max_designs:
            raise EnumerationTooLarge(f"enumeration exceeded {limit.max_designs} search nodes")
        need = N - len(chosen)
        if need == 0:
            yield Design(tuple(map(tuple, grid[chosen].tolist())), N)
            return
        free = np.flatnonzero(avail[start:]) + start
        if len(free) < need:
            return
        for i in free:
            if avail[i:].sum() < need:
                break
            chosen.append(i)
            yield from rec(i + 1, avail & ~clash[i])
            chosen.pop()

    yield from rec(0, np.ones(n, dtype=bool))


def brute_best(space: GridSpace, spec: PrivacySpec, N: int, criterion: CriterionSpec,
               limit: EnumerationLimit = EnumerationLimit()) -> Tuple[Design, float]:
    """Exact maximizer of the search objective over all permissible size-``N`` designs.

    Returns the lexicographically first optimal design and its objective value
    (the negated sum for MaxPro).
    """
    obj = make_objective(criterion, space, N)
    best, best_val = None, None
    for design in enumerate_permissible(space, spec, N, limit):
        v = obj.score(design.as_array(space.d))
        if best is None or v > best_val:
            best, best_val = design, v
    if best is None:
        raise InfeasibleDesign(f"no permissible design with {N} points exists on this grid")
    return best, float(best_val)
