"""Gridded design spaces on the cube [-1, 1]^d.

Points are addressed by integer level indices; level ``i`` of an axis with
``L`` levels sits at ``-1 + 2 i / (L - 1)``. The full grid of ``L**d`` points
is never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError

GridPoint = Tuple[int, ...]


@dataclass(frozen=True)
class LinearConstraints:
    """Half-space system ``A x <= b`` evaluated in real coordinates."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
            raise ConfigurationError(f"constraint shapes do not match: A {A.shape}, b {b.shape}")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return self.A.shape[0]

    def satisfied(self, x: np.ndarray) -> np.ndarray:
        """Row-wise feasibility of real points ``x`` (shape ``(n, d)`` or ``(d,)``)."""
        x = np.asarray(x, dtype=float)
        return np.all(x @ self.A.T <= self.b, axis=-1)

    def __eq__(self, other):
        if not isinstance(other, LinearConstraints):
            return NotImplemented
        return np.array_equal(self.A, other.A) and np.array_equal(self.b, other.b)

    def __hash__(self):
        return hash((self.A.tobytes(), self.b.tobytes()))


@dataclass(frozen=True)
class GridSpace:
    d: int
    L: int
    constraints: Optional[LinearConstraints] = field(default=None)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ConfigurationError(f"dimension must be a positive integer, got {self.d}")
        if int(self.L) != self.L or self.L < 2:
            raise ConfigurationError(f"levels per axis must be an integer >= 2, got {self.L}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "L", int(self.L))
        if self.constraints is not None and self.constraints.A.shape[1] != self.d:
            raise ConfigurationError(
                f"constraint matrix has {self.constraints.A.shape[1]} columns, expected d={self.d}")

    @property
    def size(self) -> int:
        """Number of points of the unconstrained grid, ``L**d``."""
        return self.L ** self.d

    @property
    def spacing(self) -> float:
        return 2.0 / (self.L - 1)

    def levels(self) -> np.ndarray:
        """Real coordinates of the ``L`` levels of one axis."""
        return coords(self, np.arange(self.L))

    def check_indices(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        if idx.shape[-1:] != (self.d,):
            raise ValueError(f"expected index vectors of length {self.d}, got shape {idx.shape}")
        if idx.size and (idx.min() < 0 or idx.max() >= self.L):
            raise ValueError(f"level index out of range 0..{self.L - 1}")
        return idx


def coords(space: GridSpace, idx) -> np.ndarray:
    """Vectorized index-to-coordinate map; works on any integer array."""
    idx = np.asarray(idx, dtype=float)
    # (2i - (L-1)) / (L-1) keeps levels i and L-1-i exact negatives of each other
    return (2.0 * idx - (space.L - 1)) / (space.L - 1)


def coord_of(space: GridSpace, p: Sequence[int]) -> np.ndarray:
    """Real coordinates of the grid point ``p``."""
    return coords(space, space.check_indices(np.asarray(p, dtype=int)))


def in_region(space: GridSpace, p: Sequence[int]) -> bool:
    if space.constraints is None:
        return True
    return bool(space.constraints.satisfied(coord_of(space, p)))


def region_mask(space: GridSpace, idx) -> np.ndarray:
    """``in_region`` for a stack of index vectors of shape ``(n, d)``."""
    idx = np.asarray(idx)
    if space.constraints is None:
        return np.ones(idx.shape[:-1], dtype=bool)
    return space.constraints.satisfied(coords(space, idx))


def delta_to_steps(space: GridSpace, delta: float, rtol: float = 1e-9) -> int:
    """Convert a minimum spacing ``delta`` to a whole number of grid steps.

    ``delta`` must equal ``2 s / (L - 1)`` for a positive integer ``s``.
    """
    if not delta > 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    s_real = delta * (space.L - 1) / 2.0
    s = round(s_real)
    if s < 1 or abs(s_real - s) > rtol * max(1.0, s_real):
        lo = max(1, math.floor(s_real))
        hi = max(1, math.ceil(s_real))
        near = sorted({2 * lo / (space.L - 1), 2 * hi / (space.L - 1)})
        raise ConfigurationError(
            f"delta={delta!r} is not a multiple of the grid spacing 2/(L-1) with L={space.L}; "
            f"nearest admissible values: {', '.join(f'{v:.12g}' for v in near)}")
    return int(s)


def levels_for_delta(delta: float, k: int = 1) -> int:
    """Grid density ``L = floor(2k / delta) + 1`` so that ``delta`` spans ``k`` steps."""
    if not delta > 0 or k < 1:
        raise ConfigurationError("delta must be positive and k a positive integer")
    return int(math.floor(2 * k / delta + 1e-9)) + 1


def enumerate_grid(space: GridSpace) -> np.ndarray:
    """All ``L**d`` index vectors in lexicographic order, for small grids only."""
    axes = [np.arange(space.L)] * space.d
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)
