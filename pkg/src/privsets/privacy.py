"""Privacy sets: the hard constraints a design has to respect.

Every design point ``x`` owns a set ``P(x)`` containing ``x`` that no other
design point may enter. Four families are supported, all evaluated on integer
level indices:

* ``classical``: ``P(x) = {x}``, one run per grid point;
* ``lhd``: points may not share a level on any axis;
* ``bridge``: one-dimensional projections at least ``steps`` grid steps apart;
* ``interval``: the one-dimensional time-separation variant of ``bridge``.

For the ``lhd`` and ``bridge`` kinds the union ``P(design)`` has product
structure and is tracked by an ``L x d`` table of free levels, which makes
uniform sampling from the complement cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import AvailabilityExhausted, ConfigurationError, RejectionBudgetExceeded
from .grid import GridPoint, GridSpace, enumerate_grid, region_mask

#: attempts allowed per requested point before rejection sampling gives up
REJECTION_CAP = 10_000

KINDS = ("classical", "lhd", "bridge", "interval")


@dataclass(frozen=True)
class PrivacySpec:
    kind: str
    steps: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown privacy kind {self.kind!r}; expected one of {KINDS}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigurationError(f"privacy steps must be a positive integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    @classmethod
    def classical(cls):
        return cls("classical")

    @classmethod
    def lhd(cls):
        return cls("lhd")

    @classmethod
    def bridge(cls, steps: int):
        return cls("bridge", steps)

    @classmethod
    def interval(cls, steps: int):
        return cls("interval", steps)

    @property
    def uses_mask(self) -> bool:
        return self.kind in ("lhd", "bridge")

    @property
    def radius(self) -> int:
        """Per-axis blocking radius for the mask kinds (``|i - j| < radius`` blocks)."""
        return 1 if self.kind == "lhd" else self.steps

    def check_space(self, space: GridSpace):
        if self.kind == "interval" and space.d != 1:
            raise ConfigurationError("interval privacy sets require a one-dimensional space")


@dataclass(frozen=True)
class Design:
    """A set of distinct grid points with a run capacity ``N``.

    Points are kept in lexicographic order so equal sets compare equal.
    """

    points: Tuple[GridPoint, ...]
    N: int

    def __post_init__(self):
        pts = tuple(sorted({tuple(int(v) for v in p) for p in self.points}))
        if len({len(p) for p in pts}) > 1:
            raise ValueError("design points have mixed dimensions")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"capacity must be a positive integer, got {self.N}")
        if len(pts) > self.N:
            raise ValueError(f"design has {len(pts)} points but capacity is {self.N}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_array(cls, idx, N: int) -> "Design":
        return cls(tuple(map(tuple, np.asarray(idx, dtype=int).tolist())), N)

    @classmethod
    def empty(cls, N: int) -> "Design":
        return cls((), N)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return tuple(int(v) for v in p) in self.points

    def as_array(self, d: int = None) -> np.ndarray:
        if not self.points:
            return np.zeros((0, d or 0), dtype=np.int64)
        return np.array(self.points, dtype=np.int64)


def conflict_matrix(spec: PrivacySpec, P, Q) -> np.ndarray:
    """Boolean matrix ``C[i, j] = Q[j] in P(P[i])`` for index arrays ``P`` and ``Q``."""
    P = np.asarray(P, dtype=np.int64)
    Q = np.asarray(Q, dtype=np.int64)
    if P.shape[-1] != Q.shape[-1]:
        raise ValueError(f"dimension mismatch: {P.shape[-1]} vs {Q.shape[-1]}")
    diff = np.abs(P[:, None, :] - Q[None, :, :])
    if spec.kind == "classical":
        return np.all(diff == 0, axis=2)
    return np.any(diff < spec.radius, axis=2)


def in_privacy(spec: PrivacySpec, x: Sequence[int], y: Sequence[int]) -> bool:
    """True iff ``y`` lies in the privacy set of ``x``."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if spec.kind == "interval" and x.shape != (1,):
        raise ValueError("interval privacy sets are one-dimensional")
    return bool(conflict_matrix(spec, x[None], y[None])[0, 0])


def violations(design: Design, spec: PrivacySpec) -> List[Tuple[GridPoint, GridPoint]]:
    """All unordered pairs of design points that break privacy."""
    if len(design) < 2:
        return []
    X = design.as_array()
    C = conflict_matrix(spec, X, X)
    i, j = np.nonzero(np.triu(C | C.T, k=1))
    return [(design.points[a], design.points[b]) for a, b in zip(i, j)]


def is_permissible(design: Design, spec: PrivacySpec) -> bool:
    return len(design) <= design.N and not violations(design, spec)


class AvailabilityMask:
    """Free levels per axis for the ``lhd`` and ``bridge`` kinds.

    ``free[i, a]`` is False when some design point sits within the blocking
    radius of level ``i`` on axis ``a``. A grid point lies outside the privacy
    set of the design iff all its levels are free.
    """

    def __init__(self, space: GridSpace, spec: PrivacySpec, points=()):
        if not spec.uses_mask:
            raise ConfigurationError(f"no availability mask for privacy kind {spec.kind!r}")
        self.space = space
        self.spec = spec
        self.free = np.ones((space.L, space.d), dtype=bool)
        for p in np.asarray(points, dtype=np.int64).reshape(-1, space.d):
            self.block(p)

    def block(self, p):
        r = self.spec.radius
        for a, v in enumerate(p):
            self.free[max(0, v - r + 1): v + r, a] = False

    def is_free(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return np.all(self.free[idx, np.arange(self.space.d)], axis=-1)

    def free_levels(self, axis: int) -> np.ndarray:
        return np.flatnonzero(self.free[:, axis])

    def exhausted_axes(self) -> List[int]:
        return [a for a in range(self.space.d) if not self.free[:, a].any()]


def _check_exhausted(mask: AvailabilityMask):
    dead = mask.exhausted_axes()
    if dead:
        raise AvailabilityExhausted(f"no free level left on axis {dead[0] + 1}")


def outside_privacy(space: GridSpace, points, spec: PrivacySpec, cand) -> np.ndarray:
    """Mask of candidates ``cand`` not inside the privacy set of ``points``."""
    cand = np.asarray(cand, dtype=np.int64).reshape(-1, space.d)
    points = np.asarray(points, dtype=np.int64).reshape(-1, space.d)
    if not len(points):
        return np.ones(len(cand), dtype=bool)
    return ~np.any(conflict_matrix(spec, points, cand), axis=0)


def enumerate_outside_privacy(space: GridSpace, points, spec: PrivacySpec) -> np.ndarray:
    """All in-region grid points outside ``P(points)``, in lexicographic order.

    Intended for grids small enough to enumerate.
    """
    spec.check_space(space)
    points = np.asarray(points, dtype=np.int64).reshape(-1, space.d)
    if spec.uses_mask:
        mask = AvailabilityMask(space, spec, points)
        axes = [mask.free_levels(a) for a in range(space.d)]
        if any(len(a) == 0 for a in axes):
            return np.zeros((0, space.d), dtype=np.int64)
        mesh = np.meshgrid(*axes, indexing="ij")
        cand = np.stack([m.ravel() for m in mesh], axis=1)
    else:
        cand = enumerate_grid(space)
        cand = cand[outside_privacy(space, points, spec, cand)]
    return cand[region_mask(space, cand)]


def sample_outside_privacy(space: GridSpace, design, spec: PrivacySpec, count: int, rng,
                           max_attempts: int = REJECTION_CAP) -> np.ndarray:
    """Draw ``count`` independent points from the in-region part of the complement of ``P(design)``.

    Returns an integer array of shape ``(count, d)``; duplicates are possible.
    For the mask kinds each point is built axis by axis from the free levels and
    then screened against the linear constraints. Other kinds draw uniformly
    from the whole grid and reject points inside ``P(design)`` or outside the region.
    """
    spec.check_space(space)
    points = design.as_array(space.d) if isinstance(design, Design) else \
        np.asarray(design, dtype=np.int64).reshape(-1, space.d)
    if spec.uses_mask:
        mask = AvailabilityMask(space, spec, points)
        _check_exhausted(mask)
        axes = [mask.free_levels(a) for a in range(space.d)]

        def draw(n):
            return np.stack([ax[rng.integers(len(ax), size=n)] for ax in axes], axis=1)

        def accept(c):
            return region_mask(space, c)
    else:
        def draw(n):
            return rng.integers(space.L, size=(n, space.d))

        def accept(c):
            return region_mask(space, c) & outside_privacy(space, points, spec, c)

    out = np.empty((count, space.d), dtype=np.int64)
    pending = np.arange(count)
    attempts = 0
    block = 1
    while len(pending):
        if attempts >= max_attempts:
            raise RejectionBudgetExceeded(
                f"no admissible point after {max_attempts} attempts; the region may be too small "
                "for the remaining free levels")
        block = min(block, max_attempts - attempts)
        cand = draw(len(pending) * block).reshape(len(pending), block, space.d)
        ok = accept(cand.reshape(-1, space.d)).reshape(len(pending), block)
        hit = ok.any(axis=1)
        first = ok.argmax(axis=1)
        out[pending[hit]] = cand[hit, first[hit]]
        pending = pending[~hit]
        attempts += block
        block = min(2 * block, 256)
    return out

