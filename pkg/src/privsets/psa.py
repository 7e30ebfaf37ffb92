"""Privacy sets search: greedy augmentation, mutation and the outer exchange loop.

The working representation inside a run is an ``(n, d)`` integer array of
level indices. Public functions accept and return :class:`Design` objects.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .criteria import CriterionSpec, Objective, make_objective
from .errors import (AvailabilityExhausted, ConfigurationError, MaximalityViolation,
                     RejectionBudgetExceeded)
from .grid import GridSpace, enumerate_grid, region_mask
from .privacy import (REJECTION_CAP, Design, PrivacySpec, conflict_matrix,
                      enumerate_outside_privacy, is_permissible, outside_privacy,
                      sample_outside_privacy)

log = logging.getLogger(__name__)

_CLASSICAL = PrivacySpec.classical()


@dataclass(frozen=True)
class PsaConfig:
    N: int
    spec: PrivacySpec
    criterion: CriterionSpec
    space: GridSpace
    blind_samples: int = 64
    candidate_count: int = 50
    tuning_passes: int = 2
    exhaustive_threshold: int = 20_000
    time_budget: Optional[float] = None
    restarts: int = 1
    seed: Optional[int] = None

    def __post_init__(self):
        if self.N < 1:
            raise ConfigurationError("N must be positive")
        if self.blind_samples < 1 or self.candidate_count < 1:
            raise ConfigurationError("blind_samples and candidate_count must be at least 1")
        if self.tuning_passes < 0 or self.restarts < 1:
            raise ConfigurationError("tuning_passes must be >= 0 and restarts >= 1")
        if self.time_budget is not None and self.time_budget < 0:
            raise ConfigurationError("time_budget must be non-negative")
        self.spec.check_space(self.space)
        self.criterion.check_space(self.space)

    @property
    def exhaustive(self) -> bool:
        return self.space.size <= self.exhaustive_threshold


@dataclass
class Counters:
    grp_augmentations: int = 0
    mutations_attempted: int = 0
    mutations_accepted: int = 0
    mutations_failed: int = 0
    tuning_moves: int = 0
    sweeps: int = 0


@dataclass
class RunTrace:
    """Improvement history of a search.

    ``samples`` holds ``(elapsed_seconds, best_value, restart_index)`` rows,
    one per initial design and per accepted mutation. ``restart_times`` marks
    the start of every restart after the first.
    """

    samples: List[Tuple[float, float, int]] = field(default_factory=list)
    restart_times: List[float] = field(default_factory=list)
    restart_values: List[float] = field(default_factory=list)
    converged: List[bool] = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)
    design: Optional[Design] = None
    value: float = float("-inf")
    best_restart: int = 0

    def values(self, restart: Optional[int] = None) -> List[float]:
        return [v for _, v, r in self.samples if restart is None or r == restart]


class _Run:
    """State shared by the procedures of a single search run."""

    def __init__(self, config: PsaConfig, rng, counters: Optional[Counters] = None,
                 deadline: Optional[float] = None):
        self.cfg = config
        self.space = config.space
        self.spec = config.spec
        self.rng = rng
        self.obj: Objective = make_objective(config.criterion, config.space, config.N)
        self.counters = counters or Counters()
        self.deadline = deadline

    def expired(self) -> bool:
        return self.deadline is not None and time.perf_counter() >= self.deadline

    def value(self, X) -> float:
        # canonical order keeps the value independent of how X was assembled
        X = np.asarray(X).reshape(-1, self.space.d)
        order = np.lexsort(X.T[::-1]) if len(X) else slice(None)
        return self.obj.score(X[order])

    def _pick(self, vals) -> int:
        best = np.max(vals)
        ties = np.flatnonzero(vals == best)
        return int(ties[0] if len(ties) == 1 else ties[self.rng.integers(len(ties))])

    def augment_candidates(self, X) -> np.ndarray:
        cfg = self.cfg
        try:
            if cfg.exhaustive:
                cand = enumerate_outside_privacy(self.space, X, self.spec)
            else:
                cand = sample_outside_privacy(self.space, X, self.spec, cfg.blind_samples, self.rng)
        except AvailabilityExhausted as exc:
            raise MaximalityViolation(len(X), cfg.N, str(exc)) from None
        if not len(cand):
            raise MaximalityViolation(len(X), cfg.N, "no admissible grid point left")
        return cand

    def greedy(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.space.d)
        while len(X) < self.cfg.N:
            cand = self.augment_candidates(X)
            self.obj.bind(X)
            k = self._pick(self.obj.with_added(cand))
            X = np.vstack([X, cand[k]])
            self.counters.grp_augmentations += 1
            X = self.tune(X, len(X) - 1)
        return X

    def tune(self, X, i) -> np.ndarray:
        X = X.copy()
        space = self.space
        for _ in range(self.cfg.tuning_passes):
            moved = False
            for a in range(space.d):
                others = np.delete(X, i, axis=0)
                levels = np.delete(np.arange(space.L), X[i, a])
                cand = np.repeat(X[i][None], len(levels), axis=0)
                cand[:, a] = levels
                ok = outside_privacy(space, others, self.spec, cand) & region_mask(space, cand)
                if not ok.any():
                    continue
                cand = cand[ok]
                self.obj.bind(X)
                vals = self.obj.with_replaced(i, cand)
                if np.max(vals) > self.obj.value():
                    X[i] = cand[self._pick(vals)]
                    self.counters.tuning_moves += 1
                    moved = True
            if not moved:
                break
        return X

    def mutate(self, X, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        clash = conflict_matrix(self.spec, x[None], X)[0]
        X = np.vstack([X[~clash], x])
        if len(X) == self.cfg.N + 1:
            self.obj.bind(X)
            # x itself (last row) is never removed
            k = self._pick(self.obj.with_removed()[:-1])
            X = np.delete(X, k, axis=0)
        elif len(X) < self.cfg.N:
            X = self.greedy(X)
        return X

    def region_size(self) -> Optional[int]:
        """Number of in-region grid points, counted only for enumerable grids."""
        if not hasattr(self, "_region_size"):
            self._region_size = None
            if self.space.constraints is None:
                self._region_size = self.space.size
            elif self.space.size <= max(self.cfg.exhaustive_threshold, 1):
                self._region_size = int(region_mask(self.space, enumerate_grid(self.space)).sum())
        return self._region_size

    def candidates(self, X) -> np.ndarray:
        space, count = self.space, self.cfg.candidate_count
        if self.region_size() == len(X):
            return np.zeros((0, space.d), dtype=np.int64)
        out = np.empty((count, space.d), dtype=np.int64)
        pending = np.arange(count)
        attempts = 0
        while len(pending):
            if attempts >= REJECTION_CAP:
                raise RejectionBudgetExceeded(
                    f"candidate set: no in-region grid point outside the design after {REJECTION_CAP} attempts")
            c = self.rng.integers(space.L, size=(len(pending), space.d))
            ok = region_mask(space, c) & outside_privacy(space, X, _CLASSICAL, c)
            out[pending[ok]] = c[ok]
            pending = pending[~ok]
            attempts += 1
        return out

    def search(self, X, on_improve: Optional[Callable[[np.ndarray, float], None]] = None):
        """Outer first-improvement loop; returns ``(X, value, converged)``."""
        cur = self.value(X)
        while True:
            self.counters.sweeps += 1
            improved = False
            for x in self.candidates(X):
                if self.expired():
                    return X, cur, False
                self.counters.mutations_attempted += 1
                try:
                    eta = self.mutate(X, x)
                except (MaximalityViolation, RejectionBudgetExceeded) as exc:
                    self.counters.mutations_failed += 1
                    log.debug("mutation around %s abandoned: %s", x.tolist(), exc)
                    continue
                val = self.value(eta)
                if val > cur:
                    X, cur = eta, val
                    self.counters.mutations_accepted += 1
                    if on_improve is not None:
                        on_improve(X, cur)
                    improved = True
                    break
            if not improved:
                return X, cur, True


def _rng_for(seed, restart: int):
    return np.random.default_rng([restart, seed]) if seed is not None else np.random.default_rng()


def _as_array(design: Design, space: GridSpace) -> np.ndarray:
    return design.as_array(space.d)


def greedy_augment(design: Design, config: PsaConfig, rng) -> Design:
    """Fill ``design`` up to ``N`` points, one best admissible point at a time.

    Each new point is the best of the blind search (or of the full admissible
    set on small grids), then polished one coordinate at a time.
    """
    if len(design) > config.N:
        raise ValueError("design exceeds capacity")
    run = _Run(config, rng)
    return Design.from_array(run.greedy(_as_array(design, config.space)), config.N)


def local_tune(design: Design, point, config: PsaConfig, rng) -> Design:
    """Coordinate-wise improvement of one design point, others held fixed.

    ``point`` is the grid point (index tuple) to move; it must be in the design.
    """
    X = _as_array(design, config.space)
    hits = np.flatnonzero(np.all(X == np.asarray(point), axis=1))
    if not len(hits):
        raise ValueError(f"{tuple(point)} is not a design point")
    run = _Run(config, rng)
    return Design.from_array(run.tune(X, int(hits[0])), config.N)


def mutate(design: Design, x, config: PsaConfig, rng) -> Design:
    """Maximal permissible design built from ``design`` that contains ``x``.

    Points whose privacy is violated by ``x`` are dropped, ``x`` is inserted,
    then the design is trimmed (smallest criterion drop, never ``x``) or
    refilled greedily back to ``N`` points.
    """
    if tuple(x) in design:
        raise ValueError("candidate point is already in the design")
    run = _Run(config, rng)
    return Design.from_array(run.mutate(_as_array(design, config.space), x), config.N)


def candidate_set(design: Design, config: PsaConfig, rng) -> np.ndarray:
    """Uniform in-region grid points not in the design; privacy is ignored on purpose."""
    return _Run(config, rng).candidates(_as_array(design, config.space))


def _single_run(config: PsaConfig, rng, trace: RunTrace, restart: int, t0: float,
                deadline: Optional[float], best_hook=None):
    run = _Run(config, rng, trace.counters, deadline)
    X = run.greedy(np.zeros((0, config.space.d), dtype=np.int64))
    value = run.value(X)

    def record(X_new, v):
        trace.samples.append((time.perf_counter() - t0, float(v), restart))
        if best_hook is not None:
            best_hook(v)

    record(X, value)
    X, value, converged = run.search(X, record)
    trace.converged.append(converged)
    return X, value


def psa_run(config: PsaConfig) -> Tuple[Design, RunTrace]:
    """Run the search ``config.restarts`` times and keep the best design.

    ``config.time_budget`` limits the whole call; the initial greedy design of
    the first restart is always completed, later restarts are skipped once the
    budget is spent.
    """
    trace = RunTrace()
    t0 = time.perf_counter()
    deadline = None if config.time_budget is None else t0 + config.time_budget
    best = None
    for r in range(config.restarts):
        if r and deadline is not None and time.perf_counter() >= deadline:
            break
        if r:
            trace.restart_times.append(time.perf_counter() - t0)
        X, value = _single_run(config, _rng_for(config.seed, r), trace, r, t0, deadline)
        trace.restart_values.append(value)
        if best is None or value > best[1]:
            best = (X, value, r)
    X, value, r = best
    trace.design = Design.from_array(X, config.N)
    trace.value = value
    trace.best_restart = r
    return trace.design, trace


@dataclass
class BenchTrace:
    """Best-so-far values sampled on a regular time grid, with restart flags."""

    rows: List[Tuple[float, float, int]]
    restart_times: List[float]
    design: Design
    value: float
    counters: Counters


def psa_bench(config: PsaConfig, total_time: float, interval: float) -> BenchTrace:
    """Restart the search until ``total_time`` seconds have elapsed.

    Rows are ``(t, best_value, restart_flag)`` for ``t = interval, 2 interval, ...``;
    ``best_value`` is the best value found by any run up to ``t`` and
    ``restart_flag`` is 1 when a restart began in the preceding interval.
    """
    if interval <= 0:
        raise ConfigurationError("sampling interval must be positive")
    trace = RunTrace()
    events: List[Tuple[float, float]] = []
    t0 = time.perf_counter()
    deadline = t0 + max(total_time, 0.0)
    best = None
    r = 0
    while True:
        if r:
            trace.restart_times.append(time.perf_counter() - t0)

        def hook(v):
            events.append((time.perf_counter() - t0, float(v)))

        X, value = _single_run(config, _rng_for(config.seed, r), trace, r, t0, deadline, hook)
        if best is None or value > best[1]:
            best = (X, value)
        r += 1
        if time.perf_counter() >= deadline:
            break

    rows = []
    n_steps = int(np.floor(total_time / interval + 1e-9)) if total_time > 0 else 0
    times = np.array([t for t, _ in events])
    vals = np.maximum.accumulate(np.array([v for _, v in events]))
    restarts = np.array(trace.restart_times)
    for k in range(1, n_steps + 1):
        t = k * interval
        j = np.searchsorted(times, t, side="right") - 1
        if j < 0:
            continue
        flag = int(np.any((restarts > t - interval) & (restarts <= t)))
        rows.append((t, float(vals[j]), flag))
    if not rows:
        rows.append((float(times[0]), float(vals[0]), 0))
    return BenchTrace(rows, trace.restart_times, Design.from_array(best[0], config.N), best[1],
                      trace.counters)


def check_result(design: Design, config: PsaConfig) -> bool:
    """Permissible, full size and inside the region."""
    X = _as_array(design, config.space)
    return (len(design) == config.N and is_permissible(design, config.spec)
            and bool(np.all(region_mask(config.space, X))))
