"""Acceptance criteria, each run at its stated tolerance and budget.

Every test prints one ``PASS``/``FAIL`` line. Run on its own with::

    pytest -v -s tests/test_acceptance.py

The long criteria (4, 5, 8, 9) spend their full time budgets, about 14
minutes in total on one core.
"""

import itertools
import sys
import time

import numpy as np
import pytest

from privsets import (CriterionSpec, GridSpace, LinearConstraints, ModelSpec, PrivacySpec, PsaConfig,
                      brute_best, efficiency, eval_ARD, eval_D, eval_MaxPro, is_permissible, psa_bench,
                      psa_run)
from privsets.criteria import ard_mean_reciprocal, objective_value, phi_d_matrix
from privsets.designio import write_design_csv
from privsets.grid import delta_to_steps, levels_for_delta, region_mask
from privsets.privacy import Design
from privsets.psa import check_result

FOREVER = 10 ** 6  # restarts; the time budget ends the call


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
            sys.stdout.flush()
        return ok
    return emit


def axis_gaps_ok(X, steps):
    X = np.asarray(X)
    for a in range(X.shape[1]):
        col = X[:, a]
        diff = np.abs(col[:, None] - col[None, :])[np.triu_indices(len(col), 1)]
        if len(diff) and diff.min() < steps:
            return False
    return True


# 1 ----------------------------------------------------------------------------

def test_c1_oracle_optimality(report):
    space = GridSpace(1, 9)
    spec = PrivacySpec.bridge(1)
    ok, parts = True, []
    t0 = time.perf_counter()
    for crit in (CriterionSpec.D(ModelSpec.linear(1)), CriterionSpec.ARD(1, 1, (1,))):
        _, best = brute_best(space, spec, 3, crit)
        cfg = PsaConfig(N=3, spec=spec, criterion=crit, space=space, restarts=50, seed=0)
        design, trace = psa_run(cfg)
        got = objective_value(crit, design, space)
        ok &= got == best and trace.value == best
        parts.append(f"{crit.label()} psa={got!r} oracle={best!r}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10
    assert report(1, ok, "; ".join(parts) + f"; {elapsed:.2f} s (< 10 s)")


# 2 ----------------------------------------------------------------------------

def test_c2_lhd_degeneracy(report):
    L = 6
    space = GridSpace(3, L)
    spec = PrivacySpec.bridge(delta_to_steps(space, 2 / (L - 1)))
    crit = CriterionSpec.ARD(1, 1, (1, 2))
    t0 = time.perf_counter()
    bad = 0
    for seed in range(100):
        design, _ = psa_run(PsaConfig(N=L, spec=spec, criterion=crit, space=space, seed=seed))
        X = design.as_array(3)
        if len(X) != L or any(sorted(X[:, a].tolist()) != list(range(L)) for a in range(3)):
            bad += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 30
    assert report(2, ok, f"{100 - bad}/100 outputs are Latin hypercubes; {elapsed:.2f} s (< 30 s)")


# 3 ----------------------------------------------------------------------------

def random_config(rng):
    d = int(rng.integers(1, 4))
    kind = rng.choice(["classical", "lhd", "bridge"])
    crit_kind = rng.choice(["D", "ARD", "MaxPro"])
    if kind == "lhd":
        L = int(rng.integers(4, 9))
        N, spec = L, PrivacySpec.lhd()
    elif kind == "bridge":
        s = int(rng.integers(1, 3))
        L = int(rng.integers(6, 16))
        # any maximal Bridge design has at least ceil(L / (2s - 1)) points
        N = int(rng.integers(2, -(-L // (2 * s - 1)) + 1))
        spec = PrivacySpec.bridge(s)
    else:
        L = int(rng.integers(3, 8))
        N = int(rng.integers(2, min(L ** d, 12) + 1))
        spec = PrivacySpec.classical()
    space = GridSpace(d, L)
    if crit_kind == "D":
        crit = CriterionSpec.D(ModelSpec.linear(d))
    elif crit_kind == "ARD":
        crit = CriterionSpec.ARD(float(rng.choice([1, 2])), float(rng.choice([1, 2])),
                                 tuple(sorted(set(rng.integers(1, d + 1, size=2).tolist()))))
    else:
        crit = CriterionSpec.MaxPro(2)
    return PsaConfig(N=N, spec=spec, criterion=crit, space=space, restarts=3, seed=int(rng.integers(1 << 30)))


def test_c3_trace_monotone_and_deterministic(report, tmp_path):
    rng = np.random.default_rng(2024)
    fails = []
    for k in range(20):
        cfg = random_config(rng)
        d1, t1 = psa_run(cfg)
        d2, t2 = psa_run(cfg)
        for r in range(cfg.restarts):
            v = t1.values(r)
            if np.any(np.diff(v) < 0):
                fails.append(f"config {k}: restart {r} trace decreases")
        write_design_csv(tmp_path / "a.csv", d1, cfg.space)
        write_design_csv(tmp_path / "b.csv", d2, cfg.space)
        if (tmp_path / "a.csv").read_bytes() != (tmp_path / "b.csv").read_bytes() or t1.value != t2.value:
            fails.append(f"config {k}: seed {cfg.seed} not reproducible")
        if not check_result(d1, cfg):
            fails.append(f"config {k}: output not permissible")
    ok = not fails
    assert report(3, ok, "20 random configs monotone and byte-identical" if ok else "; ".join(fails))


# 4 ----------------------------------------------------------------------------

def test_c4_figure1_self_consistency(report):
    delta = 0.05
    L = levels_for_delta(delta, 1)
    space = GridSpace(2, L)
    spec = PrivacySpec.bridge(delta_to_steps(space, delta))
    crit = CriterionSpec.D(ModelSpec.full_quadratic(2))
    values, permissible = [], True
    for seed in range(5):
        cfg = PsaConfig(N=21, spec=spec, criterion=crit, space=space, time_budget=60,
                        restarts=FOREVER, seed=seed)
        design, _ = psa_run(cfg)
        permissible &= check_result(design, cfg) and axis_gaps_ok(design.as_array(2), spec.steps)
        values.append(eval_D(crit.model, design, space))
    spread = (max(values) - min(values)) / np.mean(values)
    ok = permissible and spread <= 0.02
    assert report(4, ok, f"L={L}, D values {[round(v, 5) for v in values]}, relative spread "
                         f"{spread:.4%} (<= 2%), all permissible={permissible}")


# 5 ----------------------------------------------------------------------------

TABLE1 = {  # design optimized for J -> mean reciprocal distance under J={1}, {2}, {1,2}
    (1,): [4.2497, 2.6351, 3.7115],
    (2,): [4.4106, 2.1876, 3.6696],
    (1, 2): [4.2718, 2.2473, 3.5970],
}


def test_c5_table1_ballpark(report):
    delta = 2 / 119
    space = GridSpace(2, levels_for_delta(delta, 1), LinearConstraints([[0.5, -1.0]], [0.5]))
    spec = PrivacySpec.bridge(delta_to_steps(space, delta))
    Js = list(TABLE1)
    table = {}
    for J in Js:
        cfg = PsaConfig(N=100, spec=spec, criterion=CriterionSpec.ARD(1, 1, J), space=space,
                        time_budget=120, restarts=FOREVER, seed=5)
        design, _ = psa_run(cfg)
        assert check_result(design, cfg)
        table[J] = [ard_mean_reciprocal(CriterionSpec.ARD(1, 1, K), design, space) for K in Js]
    cells = [(J, k, table[J][k], TABLE1[J][k]) for J in Js for k in range(3)]
    worst = max(abs(got - want) / want for _, _, got, want in cells)
    diag = True
    for k, K in enumerate(Js):
        best = min(table[J][k] for J in Js)
        diag &= table[K][k] <= 1.02 * best
    ok = worst <= 0.10 and diag
    rows = "; ".join(f"J={'+'.join(map(str, J))}: {[round(v, 4) for v in table[J]]}" for J in Js)
    assert report(5, ok, f"{rows}; max cell deviation {worst:.2%} (<= 10%), diagonal within 2% = {diag}")


# 6 ----------------------------------------------------------------------------

def test_c6_homogeneity_and_reciprocity(report):
    rng = np.random.default_rng(6)
    worst_h = 0.0
    for m in (2, 6, 15):
        A = rng.normal(size=(m + 4, m))
        M = A.T @ A
        for alpha in (0.5, 2.0, 10.0):
            worst_h = max(worst_h, abs(phi_d_matrix(alpha * M) - alpha * phi_d_matrix(M)) / (alpha * phi_d_matrix(M)))
    worst_r = 0.0
    for a, b in rng.uniform(1e-3, 1e3, size=(200, 2)):
        worst_r = max(worst_r, abs(efficiency(a, b) * efficiency(b, a) - 1.0))
    ok = worst_h < 1e-10 and worst_r <= 1e-12
    assert report(6, ok, f"homogeneity rel. err {worst_h:.2e} (< 1e-10), reciprocity err {worst_r:.2e} (<= 1e-12)")


# 7 ----------------------------------------------------------------------------

def test_c7_micro_oracles(report):
    g3 = GridSpace(1, 3)
    d_val = eval_D(ModelSpec.linear(1), Design(((1,), (2,)), 2), g3)
    ard_val = eval_ARD(CriterionSpec.ARD(1, 1, (1,)), Design(((0,), (1,), (2,)), 3), g3)
    mp_val = eval_MaxPro(CriterionSpec.MaxPro(2), Design(((0, 0), (2, 2)), 2), GridSpace(2, 3))
    errs = [abs(d_val - 0.5), abs(ard_val - 1.2), abs(mp_val - 0.0625)]
    ok = max(errs) <= 1e-12
    assert report(7, ok, f"D={d_val!r} (0.5), ARD={ard_val!r} (1.2), MaxPro={mp_val!r} (0.0625)")


# 8 ----------------------------------------------------------------------------

def test_c8_constrained_region_integrity(report):
    delta = 2 / 139
    cons = LinearConstraints([[2 / 3, -1.0, 0.0], [0.0, 0.75, -1.0]], [1 / 3, 0.25])
    space = GridSpace(3, levels_for_delta(delta, 1), cons)
    spec = PrivacySpec.bridge(delta_to_steps(space, delta))
    crit = CriterionSpec.ARD(1, 1, (1, 2))
    cfg = PsaConfig(N=100, spec=spec, criterion=crit, space=space, time_budget=120, seed=8)
    t0 = time.perf_counter()
    design, _ = psa_run(cfg)
    elapsed = time.perf_counter() - t0
    X = design.as_array(3)
    inside = bool(np.all(region_mask(space, X)))
    gaps = axis_gaps_ok(X, spec.steps)
    ok = len(X) == 100 and inside and gaps and is_permissible(design, spec) and elapsed <= 120
    assert report(8, ok, f"L={space.L}, {len(X)} points, constraints hold={inside}, axis gaps >= "
                         f"{spec.steps} steps={gaps}, {elapsed:.1f} s (<= 120 s)")


# 9 ----------------------------------------------------------------------------

@pytest.mark.parametrize("d, N, total, interval", [(2, 21, 10.0, 0.05), (4, 41, 60.0, 2.0)])
def test_c9_bench_trace_shape(report, d, N, total, interval):
    delta = 0.05 if d == 2 else 1 / (N - 1)
    space = GridSpace(d, levels_for_delta(delta, 1))
    spec = PrivacySpec.bridge(delta_to_steps(space, delta))
    cfg = PsaConfig(N=N, spec=spec, criterion=CriterionSpec.D(ModelSpec.full_quadratic(d)), space=space,
                    seed=9)
    bench = psa_bench(cfg, total, interval)
    rows = np.array(bench.rows)
    expected = int(round(total / interval))
    monotone = bool(np.all(np.diff(rows[:, 1]) >= 0))
    markers = int(rows[:, 2].sum())
    ok = monotone and markers >= 1 and 0.9 * expected <= len(rows) <= expected
    assert report(9, ok, f"d={d} N={N} T={total:g} t={interval:g}: {len(rows)} rows (~{expected}), "
                         f"monotone={monotone}, {markers} restart markers, "
                         f"{len(bench.restart_times)} restarts")
