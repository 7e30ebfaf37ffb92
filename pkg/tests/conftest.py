import itertools

import numpy as np
import pytest

from privsets import Design, GridSpace


def brute_det_phi(points, N, powers):
    """D value from an explicitly accumulated information matrix (no library code)."""
    m = len(powers)
    M = np.zeros((m, m))
    for x in points:
        f = np.array([np.prod([xi ** e for xi, e in zip(x, p)]) for p in powers])
        M += np.outer(f, f)
    det = np.linalg.det(M / N)
    return max(det, 0.0) ** (1.0 / m)


def all_subsets(space: GridSpace, n: int):
    pts = list(itertools.product(range(space.L), repeat=space.d))
    return itertools.combinations(pts, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def design(points, N=None):
    points = [tuple(p) if isinstance(p, (tuple, list)) else (p,) for p in points]
    return Design(tuple(points), N if N is not None else max(1, len(points)))
