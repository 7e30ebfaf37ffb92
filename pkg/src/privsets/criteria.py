"""Design criteria: D-optimality, projection-aware ARD and MaxPro.

All criteria are evaluated on real coordinates of the design points. The
search code maximizes, so each criterion is also exposed through an
objective object that scores many one-point modifications of a design in a
single vectorized call.

Notes on the distance criteria
------------------------------
ARD averages ``(j**(1/z) / rho_z)**lam`` over all unordered pairs and all
``C(d, j)`` coordinate subspaces of each dimension ``j`` in ``J``, normalizes
by ``C(N, 2) * sum_j C(d, j)`` and raises the mean to ``-1/lam``; larger is
better. :func:`ard_mean_reciprocal` returns the mean itself (smaller is
better), which is the scale on which ARD tables are usually reported.

MaxPro sums ``1 / prod_i |x_i - y_i|**z`` over unordered pairs, using the
absolute difference of scalar coordinates on each axis. It is a cost; the
search maximizes its negative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DegenerateProjection
from .grid import GridSpace, coords
from .privacy import Design

# eigenvalues below this fraction of the largest count as zero
_SINGULAR_RTOL = 1e-12
_DET_FLOOR = 1e-300
# cap on scratch array size (elements) for batched evaluation
_CHUNK = 2_000_000


@dataclass(frozen=True)
class ModelSpec:
    """Polynomial regression model given by exponent vectors, one row per term."""

    terms: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        terms = tuple(tuple(int(e) for e in t) for t in self.terms)
        if not terms or len({len(t) for t in terms}) != 1:
            raise ConfigurationError("model needs at least one term, all of the same length")
        if any(e < 0 for t in terms for e in t):
            raise ConfigurationError("model exponents must be non-negative")
        object.__setattr__(self, "terms", terms)

    @property
    def d(self) -> int:
        return len(self.terms[0])

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def exponents(self) -> np.ndarray:
        return np.array(self.terms, dtype=float)

    @classmethod
    def linear(cls, d: int) -> "ModelSpec":
        eye = np.eye(d, dtype=int)
        return cls((tuple([0] * d),) + tuple(map(tuple, eye)))

    @classmethod
    def full_quadratic(cls, d: int) -> "ModelSpec":
        eye = np.eye(d, dtype=int)
        inter = [tuple(eye[i] + eye[j]) for i, j in itertools.combinations(range(d), 2)]
        return cls((tuple([0] * d),) + tuple(map(tuple, eye)) + tuple(map(tuple, 2 * eye))
                   + tuple(inter))


def regressors(model: ModelSpec, X) -> np.ndarray:
    """Regressor rows ``f(x)`` for real points ``X`` of shape ``(n, d)``."""
    X = np.asarray(X, dtype=float)
    # 0.0 ** 0 == 1, so the intercept needs no special case
    return np.prod(X[:, None, :] ** model.exponents[None, :, :], axis=2)


def regressor(model: ModelSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.d,):
        raise ValueError(f"expected a point of length {model.d}, got shape {x.shape}")
    return regressors(model, x[None])[0]


def info_matrix(model: ModelSpec, design: Design, space: GridSpace) -> np.ndarray:
    """Standardized information matrix, normalized by the capacity ``N``."""
    F = regressors(model, coords(space, design.as_array(space.d)))
    return F.T @ F / design.N


def _phi_d_batch(S: np.ndarray, N: int) -> np.ndarray:
    """``det(S / N) ** (1/m)`` for a stack of symmetric PSD matrices, 0 when singular."""
    m = S.shape[-1]
    lam = np.linalg.eigvalsh(S)
    top = lam[..., -1]
    ok = (lam[..., 0] > _SINGULAR_RTOL * np.maximum(top, 0.0)) & (top > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logdet = np.sum(np.log(np.where(ok[..., None], lam, 1.0)), axis=-1) - m * math.log(N)
    ok &= logdet > math.log(_DET_FLOOR)
    return np.where(ok, np.exp(logdet / m), 0.0)


def phi_d_matrix(M) -> float:
    """``det(M) ** (1/m)`` of a symmetric PSD matrix; 0 for singular input."""
    return float(_phi_d_batch(np.asarray(M, dtype=float)[None], 1)[0])


def eval_D(model: ModelSpec, design: Design, space: GridSpace) -> float:
    if not len(design):
        raise ValueError("D-criterion needs a non-empty design")
    F = regressors(model, coords(space, design.as_array(space.d)))
    return float(_phi_d_batch((F.T @ F)[None], design.N)[0])


def phi_d_full(model: ModelSpec, design: Design, space: GridSpace) -> float:
    """Reference D value from an explicit determinant, no batching or eigen shortcuts."""
    M = info_matrix(model, design, space)
    det = np.linalg.det(M)
    return 0.0 if det <= _DET_FLOOR else float(det ** (1.0 / model.m))


@dataclass(frozen=True)
class CriterionSpec:
    """Objective selection.

    ``kind`` is ``"D"`` (needs ``model``), ``"ARD"`` (``z``, ``lam``, ``J``) or
    ``"MaxPro"`` (``z``).
    """

    kind: str
    model: Optional[ModelSpec] = None
    z: float = 1.0
    lam: float = 1.0
    J: Tuple[int, ...] = field(default=(1,))

    def __post_init__(self):
        if self.kind not in ("D", "ARD", "MaxPro"):
            raise ConfigurationError(f"unknown criterion {self.kind!r}")
        if self.kind == "D" and self.model is None:
            raise ConfigurationError("the D-criterion needs a regression model")
        if self.kind == "ARD":
            J = tuple(sorted(set(int(j) for j in self.J)))
            if not J or J[0] < 1:
                raise ConfigurationError("ARD needs a non-empty set J of positive subspace dimensions")
            if self.z < 1 or self.lam < 1:
                raise ConfigurationError("ARD needs z >= 1 and lambda >= 1")
            object.__setattr__(self, "J", J)
        if self.kind == "MaxPro" and not self.z > 0:
            raise ConfigurationError("MaxPro needs z > 0")

    @classmethod
    def D(cls, model: ModelSpec):
        return cls("D", model=model)

    @classmethod
    def ARD(cls, z: float = 1.0, lam: float = 1.0, J: Sequence[int] = (1,)):
        return cls("ARD", z=z, lam=lam, J=tuple(J))

    @classmethod
    def MaxPro(cls, z: float = 2.0):
        return cls("MaxPro", z=z)

    def check_space(self, space: GridSpace):
        if self.kind == "D" and self.model.d != space.d:
            raise ConfigurationError(f"model is for d={self.model.d}, space has d={space.d}")
        if self.kind == "ARD" and max(self.J) > space.d:
            raise ConfigurationError(f"ARD subspace dimension {max(self.J)} exceeds d={space.d}")

    def label(self) -> str:
        if self.kind == "D":
            return f"D(m={self.model.m})"
        if self.kind == "ARD":
            return f"ARD(z={self.z:g},lambda={self.lam:g},J={{{','.join(map(str, self.J))}}})"
        return f"MaxPro(z={self.z:g})"


def ard_subspaces(d: int, J: Sequence[int]):
    """All coordinate subspaces used by ARD as (axes, dimension) pairs."""
    return [(axes, j) for j in J for axes in itertools.combinations(range(d), j)]


def _ard_pair_terms(crit: CriterionSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Summed ARD terms between every row of ``A`` and every row of ``B``."""
    dz = np.abs(A[:, None, :] - B[None, :, :]) ** crit.z
    out = np.zeros(dz.shape[:2])
    with np.errstate(divide="ignore"):
        for axes, j in ard_subspaces(A.shape[1], crit.J):
            rho_z = dz[:, :, list(axes)].sum(axis=2)
            out += j ** (crit.lam / crit.z) * rho_z ** (-crit.lam / crit.z)
    return out


def _maxpro_pair_terms(crit: CriterionSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    prod = np.prod(np.abs(A[:, None, :] - B[None, :, :]) ** crit.z, axis=2)
    with np.errstate(divide="ignore"):
        return 1.0 / prod


def _pair_total(crit, X, pair_terms, name):
    n = len(X)
    if n < 2:
        raise ValueError(f"{name} needs at least two design points")
    G = pair_terms(crit, X, X)
    iu = np.triu_indices(n, k=1)
    bad = ~np.isfinite(G[iu])
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise DegenerateProjection(
            f"{name}: points {X[iu[0][k]].tolist()} and {X[iu[1][k]].tolist()} coincide on a projection")
    return float(G[iu].sum())


def _ard_normalizer(crit: CriterionSpec, d: int, N: int) -> float:
    return math.comb(N, 2) * sum(math.comb(d, j) for j in crit.J)


def ard_mean_reciprocal(crit: CriterionSpec, design: Design, space: GridSpace) -> float:
    """Average of ``(j**(1/z) / rho_z)**lam`` over pairs and subspaces (smaller is better)."""
    crit.check_space(space)
    X = coords(space, design.as_array(space.d))
    if len(design) >= 2:
        bad = [axes for axes, _ in ard_subspaces(space.d, crit.J)
               if len(np.unique(X[:, list(axes)], axis=0)) < len(X)]
        if bad:
            raise DegenerateProjection(
                f"ARD: two design points share their projection onto axes {[a + 1 for a in bad[0]]}")
    total = _pair_total(crit, X, _ard_pair_terms, "ARD")
    return total / _ard_normalizer(crit, space.d, design.N)


def eval_ARD(crit: CriterionSpec, design: Design, space: GridSpace) -> float:
    return ard_mean_reciprocal(crit, design, space) ** (-1.0 / crit.lam)


def eval_MaxPro(crit: CriterionSpec, design: Design, space: GridSpace) -> float:
    X = coords(space, design.as_array(space.d))
    if len(design) >= 2:
        for a in range(space.d):
            if len(np.unique(X[:, a])) < len(X):
                raise DegenerateProjection(f"MaxPro: two design points share a level on axis {a + 1}")
    return _pair_total(crit, X, _maxpro_pair_terms, "MaxPro")


def evaluate(crit: CriterionSpec, design: Design, space: GridSpace) -> float:
    """Reported criterion value (MaxPro as its raw cost)."""
    if crit.kind == "D":
        return eval_D(crit.model, design, space)
    if crit.kind == "ARD":
        return eval_ARD(crit, design, space)
    return eval_MaxPro(crit, design, space)


def efficiency(phi_xi: float, phi_eta: float) -> float:
    """Mutual efficiency ``phi_xi / phi_eta`` of two designs under one criterion."""
    if not phi_eta > 0:
        raise ValueError(f"efficiency needs a positive reference value, got {phi_eta}")
    return phi_xi / phi_eta


class DistanceSummary(NamedTuple):
    min: float
    q1: float
    median: float
    q3: float
    max: float
    distances: np.ndarray


def cube_vertices(d: int) -> np.ndarray:
    return np.array(list(itertools.product((-1.0, 1.0), repeat=d)))


def uniform_probes(d: int, count: int, rng) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(count, d))


def nearest_distance_stats(design: Design, space: GridSpace, probes) -> DistanceSummary:
    """Five-number summary of Euclidean distances from probes to their nearest design point."""
    if not len(design):
        raise ValueError("distance statistics need a non-empty design")
    tree = cKDTree(coords(space, design.as_array(space.d)))
    dist, _ = tree.query(np.asarray(probes, dtype=float).reshape(-1, space.d))
    q = np.percentile(dist, [0, 25, 50, 75, 100])
    return DistanceSummary(*map(float, q), dist)


# --- objectives used by the search -------------------------------------------------


class Objective:
    """Maximized objective bound to the current design.

    ``bind`` takes the index array of the current points; the scoring methods
    return the objective of one-point modifications without changing the bound
    state.
    """

    def __init__(self, crit: CriterionSpec, space: GridSpace, N: int):
        crit.check_space(space)
        self.crit = crit
        self.space = space
        self.N = N

    def bind(self, X_idx: np.ndarray):
        raise NotImplementedError

    def value(self) -> float:
        raise NotImplementedError

    def with_added(self, C_idx) -> np.ndarray:
        raise NotImplementedError

    def with_removed(self) -> np.ndarray:
        raise NotImplementedError

    def with_replaced(self, i: int, C_idx) -> np.ndarray:
        raise NotImplementedError

    def score(self, X_idx) -> float:
        self.bind(X_idx)
        return self.value()


class DObjective(Objective):
    def bind(self, X_idx):
        self.F = regressors(self.crit.model, coords(self.space, X_idx))
        self.S = self.F.T @ self.F

    def value(self):
        return float(_phi_d_batch(self.S[None], self.N)[0])

    def _batched(self, base, G):
        m = base.shape[0]
        out = np.empty(len(G))
        step = max(1, _CHUNK // (m * m))
        for s in range(0, len(G), step):
            g = G[s:s + step]
            out[s:s + step] = _phi_d_batch(base[None] + g[:, :, None] * g[:, None, :], self.N)
        return out

    def with_added(self, C_idx):
        G = regressors(self.crit.model, coords(self.space, np.asarray(C_idx).reshape(-1, self.space.d)))
        return self._batched(self.S, G)

    def with_removed(self):
        F = self.F
        return _phi_d_batch(self.S[None] - F[:, :, None] * F[:, None, :], self.N)

    def with_replaced(self, i, C_idx):
        f = self.F[i]
        return self.with_added_to(self.S - np.outer(f, f), C_idx)

    def with_added_to(self, base, C_idx):
        G = regressors(self.crit.model, coords(self.space, np.asarray(C_idx).reshape(-1, self.space.d)))
        return self._batched(base, G)


class PairObjective(Objective):
    """Objectives that are functions of a sum of pairwise terms."""

    def __init__(self, crit, space, N):
        super().__init__(crit, space, N)
        self._terms = _ard_pair_terms if crit.kind == "ARD" else _maxpro_pair_terms
        if crit.kind == "ARD":
            self._norm = _ard_normalizer(crit, space.d, N)

    def transform(self, total):
        """Map a pair-term total (may be inf) to the maximized objective."""
        total = np.asarray(total, dtype=float)
        if self.crit.kind == "MaxPro":
            return -total
        with np.errstate(divide="ignore"):
            return (total / self._norm) ** (-1.0 / self.crit.lam)

    def _split(self, G):
        inf = ~np.isfinite(G)
        return np.where(inf, 0.0, G), inf

    def bind(self, X_idx):
        self.X = coords(self.space, np.asarray(X_idx).reshape(-1, self.space.d))
        G = self._terms(self.crit, self.X, self.X)
        np.fill_diagonal(G, 0.0)
        fin, inf = self._split(G)
        self.row = fin.sum(axis=1)
        self.row_inf = inf.sum(axis=1)
        self.total = self.row.sum() / 2
        self.total_inf = self.row_inf.sum() // 2

    def _combine(self, fin, n_inf):
        return self.transform(np.where(n_inf > 0, np.inf, fin))

    def value(self):
        return float(self._combine(np.array(self.total), np.array(self.total_inf)))

    def _add_terms(self, C, X):
        out_fin = np.empty(len(C))
        out_inf = np.empty(len(C), dtype=np.int64)
        step = max(1, _CHUNK // max(1, len(X) * self.space.d))
        for s in range(0, len(C), step):
            fin, inf = self._split(self._terms(self.crit, C[s:s + step], X))
            out_fin[s:s + step] = fin.sum(axis=1)
            out_inf[s:s + step] = inf.sum(axis=1)
        return out_fin, out_inf

    def with_added(self, C_idx):
        C = coords(self.space, np.asarray(C_idx).reshape(-1, self.space.d))
        fin, inf = self._add_terms(C, self.X)
        return self._combine(self.total + fin, self.total_inf + inf)

    def with_removed(self):
        return self._combine(self.total - self.row, self.total_inf - self.row_inf)

    def with_replaced(self, i, C_idx):
        C = coords(self.space, np.asarray(C_idx).reshape(-1, self.space.d))
        rest = np.delete(self.X, i, axis=0)
        fin, inf = self._add_terms(C, rest)
        return self._combine(self.total - self.row[i] + fin, self.total_inf - self.row_inf[i] + inf)


def make_objective(crit: CriterionSpec, space: GridSpace, N: int) -> Objective:
    if crit.kind == "D":
        return DObjective(crit, space, N)
    return PairObjective(crit, space, N)


def objective_value(crit: CriterionSpec, design: Design, space: GridSpace) -> float:
    """The maximized form of a criterion for any design, including tiny or degenerate ones."""
    return make_objective(crit, space, design.N).score(design.as_array(space.d))
