import itertools

import numpy as np
import pytest

from privsets import (CriterionSpec, Design, EnumerationLimit, EnumerationTooLarge, GridSpace, InfeasibleDesign,
                      LinearConstraints, ModelSpec, PrivacySpec, brute_best, enumerate_permissible, is_permissible)
from privsets.grid import coords, enumerate_grid, region_mask

from conftest import brute_det_phi


def _naive(space, spec, N):
    grid = enumerate_grid(space)
    grid = [tuple(p) for p in grid[region_mask(space, grid)].tolist()]
    return [Design(c, N) for c in itertools.combinations(grid, N) if is_permissible(Design(c, N), spec)]


def test_forced_designs():
    assert [d.points for d in enumerate_permissible(GridSpace(1, 3), PrivacySpec.bridge(1), 3)] == [((0,), (1,), (2,))]
    assert [d.points for d in enumerate_permissible(GridSpace(1, 3), PrivacySpec.bridge(2), 2)] == [((0,), (2,))]


def test_lhd_count_matches_permutation_generator():
    space = GridSpace(2, 3)
    got = list(enumerate_permissible(space, PrivacySpec.bridge(1), 3))
    # independent route: every pair of permutations (sigma, tau) gives the point set {(sigma(i), tau(i))}
    perms = list(itertools.permutations(range(3)))
    gen = {frozenset(zip(s, t)) for s in perms for t in perms}
    assert len(gen) == 6
    assert {frozenset(d.points) for d in got} == gen
    assert len(got) == 6


@pytest.mark.parametrize("space, spec, N", [
    (GridSpace(1, 9), PrivacySpec.bridge(2), 3),
    (GridSpace(2, 4), PrivacySpec.bridge(1), 3),
    (GridSpace(2, 4), PrivacySpec.lhd(), 4),
    (GridSpace(2, 3), PrivacySpec.classical(), 4),
    (GridSpace(1, 10), PrivacySpec.interval(3), 3),
    (GridSpace(2, 5, LinearConstraints([[0.5, -1.0]], [0.5])), PrivacySpec.bridge(1), 4),
    (GridSpace(3, 3), PrivacySpec.bridge(1), 2),
])
def test_enumeration_equals_naive_subsets(space, spec, N):
    got = list(enumerate_permissible(space, spec, N))
    want = _naive(space, spec, N)
    assert [d.points for d in got] == [d.points for d in want]  # same set, same lexicographic order
    assert all(is_permissible(d, spec) for d in got)


def test_random_subsets_are_all_enumerated():
    space = GridSpace(2, 5)
    spec = PrivacySpec.bridge(1)
    found = {d.points for d in enumerate_permissible(space, spec, 4)}
    rng = np.random.default_rng(7)
    grid = enumerate_grid(space)
    hits = 0
    for _ in range(100_000 // 20):
        for pick in (rng.choice(25, size=4, replace=False) for _ in range(20)):
            dz = Design.from_array(grid[pick], 4)
            if is_permissible(dz, spec):
                hits += 1
                assert dz.points in found
    assert hits > 0


def test_brute_best_d_example():
    best, val = brute_best(GridSpace(1, 5), PrivacySpec.bridge(1), 2, CriterionSpec.D(ModelSpec.linear(1)))
    assert best.points == ((0,), (4,))
    assert val == pytest.approx(1.0, rel=1e-12)
    # cross-check with an independent determinant over all permissible pairs
    space = GridSpace(1, 5)
    vals = {p: brute_det_phi(coords(space, np.array(p)[:, None]), 2, [(0,), (1,)])
            for p in itertools.combinations(range(5), 2)}
    assert max(vals, key=vals.get) == (0, 4)


def test_brute_best_ard_example():
    best, val = brute_best(GridSpace(1, 5), PrivacySpec.bridge(1), 2, CriterionSpec.ARD(1, 1, (1,)))
    assert best.points == ((0,), (4,))
    assert val == pytest.approx(2.0, rel=1e-12)


def test_brute_best_error_paths():
    with pytest.raises(InfeasibleDesign):
        brute_best(GridSpace(1, 5), PrivacySpec.bridge(3), 3, CriterionSpec.ARD())
    with pytest.raises(EnumerationTooLarge):
        brute_best(GridSpace(2, 12), PrivacySpec.bridge(1), 6, CriterionSpec.ARD(), EnumerationLimit(1000))
