import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from privsets import (CriterionSpec, Design, GridSpace, LinearConstraints, MaximalityViolation, ModelSpec,
                      PrivacySpec, PsaConfig, brute_best, candidate_set, eval_D, greedy_augment, in_privacy,
                      is_permissible, local_tune, mutate, psa_bench, psa_run)
from privsets.criteria import objective_value
from privsets.grid import coords, region_mask
from privsets.psa import check_result

from conftest import brute_det_phi, design

LIN1 = CriterionSpec.D(ModelSpec.linear(1))


def cfg1(L=5, N=2, steps=1, crit=LIN1, **kw):
    return PsaConfig(N=N, spec=PrivacySpec.bridge(steps), criterion=crit, space=GridSpace(1, L), **kw)


def test_greedy_from_empty_d1():
    # enumeration of all permissible pairs: (-1, 1) is the unique maximizer
    space = GridSpace(1, 5)
    vals = {p: brute_det_phi(coords(space, np.array(p)[:, None]), 2, [(0,), (1,)])
            for p in itertools.combinations(range(5), 2)}
    top = max(vals.values())
    assert [p for p, v in vals.items() if v == top] == [(0, 4)]
    # from the left endpoint the greedy step and tuning reach the optimum
    for seed in range(10):
        out = greedy_augment(design([0], 2), cfg1(), np.random.default_rng(seed))
        assert out.points == ((0,), (4,))
    # from scratch the first point is a tie among singular designs, so only the second is optimized
    for seed in range(10):
        out = greedy_augment(Design.empty(2), cfg1(), np.random.default_rng(seed))
        first = [p for p in out.points if p not in ((0,), (4,))]
        assert len(out) == 2 and is_permissible(out, cfg1().spec)
        if first:
            assert out.points in (((0,), first[0]), (first[0], (4,)))


def test_greedy_from_empty_random_first_point():
    seen = {greedy_augment(Design.empty(2), cfg1(), np.random.default_rng(s)).points for s in range(40)}
    assert ((0,), (4,)) in seen and len(seen) > 1


def test_greedy_maximality_violation():
    with pytest.raises(MaximalityViolation) as info:
        greedy_augment(design([1], 2), cfg1(L=3, steps=2), np.random.default_rng(0))
    assert info.value.achieved == 1 and info.value.required == 2


def test_greedy_full_design_unchanged():
    dz = design([0, 3], 2)
    assert greedy_augment(dz, cfg1(), np.random.default_rng(0)) == dz


def test_greedy_blind_search_path():
    cfg = PsaConfig(N=8, spec=PrivacySpec.bridge(2), criterion=CriterionSpec.D(ModelSpec.linear(3)),
                    space=GridSpace(3, 30), exhaustive_threshold=10, blind_samples=16)
    out = greedy_augment(Design.empty(8), cfg, np.random.default_rng(1))
    assert check_result(out, cfg)


def test_local_tune_moves_to_endpoint():
    space = GridSpace(1, 5)
    # free coordinate scan for the second point with -1 fixed
    vals = {i: brute_det_phi(coords(space, np.array([[0], [i]])), 2, [(0,), (1,)]) for i in range(1, 5)}
    assert max(vals, key=vals.get) == 4
    out = local_tune(design([0, 2], 2), (2,), cfg1(), np.random.default_rng(0))
    assert out.points == ((0,), (4,))


def test_local_tune_fixed_point_and_blocked_axis():
    cfg = cfg1()
    dz = design([0, 4], 2)
    assert local_tune(dz, (4,), cfg, np.random.default_rng(0)) == dz
    # every other level of the single axis is blocked by the neighbour
    blocked = design([0, 2], 2)
    cfg = cfg1(L=4, steps=2)
    assert local_tune(blocked, (2,), cfg, np.random.default_rng(0)).points in (((0,), (2,)), ((0,), (3,)))
    cfg = cfg1(L=3, steps=2)
    assert local_tune(design([0, 2], 2), (2,), cfg, np.random.default_rng(0)) == design([0, 2], 2)


def test_local_tune_unknown_point():
    with pytest.raises(ValueError):
        local_tune(design([0, 4], 2), (3,), cfg1(), np.random.default_rng(0))


def _cfg2(N, L=40, steps=3, crit=None):
    return PsaConfig(N=N, spec=PrivacySpec.bridge(steps),
                     criterion=crit or CriterionSpec.D(ModelSpec.full_quadratic(2)), space=GridSpace(2, L))


def test_mutate_no_collision_drops_a_point():
    cfg = PsaConfig(N=3, spec=PrivacySpec.bridge(3), criterion=LIN1, space=GridSpace(1, 30))
    dz = design([0, 10, 20], 3)
    out = mutate(dz, (5,), cfg, np.random.default_rng(0))
    assert len(out) == 3 and (5,) in out and is_permissible(out, cfg.spec)
    # the dropped point is the one whose removal hurts least
    rest = [Design(tuple(p for p in dz.points + ((5,),) if p != q), 3) for q in dz.points]
    best = max(rest, key=lambda r: eval_D(LIN1.model, r, cfg.space))
    assert out == best


def test_mutate_single_collision_keeps_size():
    cfg = PsaConfig(N=3, spec=PrivacySpec.bridge(3), criterion=LIN1, space=GridSpace(1, 30))
    out = mutate(design([0, 10, 20], 3), (11,), cfg, np.random.default_rng(0))
    assert out == design([0, 11, 20], 3)


def test_mutate_three_collisions_refills():
    cfg = _cfg2(4)
    dz = design([(8, 0), (11, 10), (20, 20), (30, 30)], 4)
    assert is_permissible(dz, cfg.spec)
    x = (10, 21)
    assert sum(in_privacy(cfg.spec, x, p) for p in dz.points) == 3
    out = mutate(dz, x, cfg, np.random.default_rng(0))
    assert len(out) == 4 and x in out and (30, 30) in out
    assert is_permissible(out, cfg.spec)


def test_mutate_rejects_existing_point():
    with pytest.raises(ValueError):
        mutate(design([0, 4], 2), (4,), cfg1(), np.random.default_rng(0))


@given(st.integers(0, 100_000))
@settings(max_examples=60, deadline=None)
def test_mutate_keeps_x_and_permissibility(seed):
    rng = np.random.default_rng(seed)
    crit = [CriterionSpec.D(ModelSpec.full_quadratic(2)), CriterionSpec.ARD(1, 1, (1, 2)),
            CriterionSpec.MaxPro(2)][seed % 3]
    cfg = _cfg2(6, L=30, steps=2, crit=crit)
    dz = greedy_augment(Design.empty(6), cfg, rng)
    for x in candidate_set(dz, cfg, rng)[:5]:
        out = mutate(dz, x, cfg, rng)
        assert tuple(x) in out
        assert len(out) == 6 and is_permissible(out, cfg.spec)


def test_candidate_set_rules(rng):
    space = GridSpace(2, 9, LinearConstraints([[1.0, 1.0]], [0.0]))
    cfg = PsaConfig(N=3, spec=PrivacySpec.bridge(1), criterion=CriterionSpec.ARD(), space=space,
                    candidate_count=500)
    dz = design([(0, 0), (1, 2), (3, 1)], 3)
    cand = candidate_set(dz, cfg, rng)
    assert len(cand) == 500
    assert not any(tuple(c) in dz for c in cand)
    assert region_mask(space, cand).all()
    # privacy is deliberately not enforced
    assert any(any(in_privacy(cfg.spec, p, c) for p in dz.points) for c in cand)


def test_candidate_set_uniform(rng):
    from scipy.stats import chisquare
    cfg = PsaConfig(N=2, spec=PrivacySpec.bridge(1), criterion=CriterionSpec.ARD(), space=GridSpace(2, 3),
                    candidate_count=10_000)
    cand = candidate_set(design([(1, 1)], 2), cfg, rng)
    keys = cand[:, 0] * 3 + cand[:, 1]
    counts = np.bincount(keys, minlength=9)
    assert counts[4] == 0
    assert chisquare(np.delete(counts, 4)).pvalue > 1e-3


def test_psa_matches_oracle_small():
    cfg = cfg1(L=9, N=3, restarts=50, seed=0)
    out, trace = psa_run(cfg)
    _, best = brute_best(cfg.space, cfg.spec, 3, LIN1)
    assert trace.value == best
    assert objective_value(LIN1, out, cfg.space) == best


def test_psa_unique_design():
    cfg = cfg1(L=5, N=5, seed=1)
    out, trace = psa_run(cfg)
    assert out == design(range(5), 5)
    assert trace.counters.mutations_accepted == 0


def test_psa_time_budget_floor():
    cfg = _cfg2(21, L=41, steps=1)
    cfg = PsaConfig(**{**cfg.__dict__, "time_budget": 0.01, "seed": 3})
    out, trace = psa_run(cfg)
    assert check_result(out, cfg)
    assert trace.converged == [False] or trace.converged == [True]


def test_psa_maximality_violation_propagates():
    # 5 levels with 2-step spacing: a maximal design can stop at 2 points
    cfg = PsaConfig(N=3, spec=PrivacySpec.bridge(2), criterion=CriterionSpec.ARD(1, 1, (1, 2)),
                    space=GridSpace(2, 5), seed=0)
    with pytest.raises(MaximalityViolation):
        for seed in range(20):
            psa_run(PsaConfig(**{**cfg.__dict__, "seed": seed}))


def _random_config(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    N = int(rng.integers(3, 9))
    steps = int(rng.integers(1, 3))
    L = N * steps + int(rng.integers(0, 6))
    kind = rng.choice(["D", "ARD", "MaxPro"])
    if kind == "D":
        crit = CriterionSpec.D(ModelSpec.linear(d) if rng.random() < 0.5 or N < 1 + 2 * d + d * (d - 1) // 2
                               else ModelSpec.full_quadratic(d))
    elif kind == "ARD":
        crit = CriterionSpec.ARD(float(rng.integers(1, 3)), 1.0, tuple(range(1, d + 1)))
    else:
        crit = CriterionSpec.MaxPro(2)
    return PsaConfig(N=N, spec=PrivacySpec.bridge(steps), criterion=crit, space=GridSpace(d, L),
                     restarts=2, seed=seed, candidate_count=20, exhaustive_threshold=500)


@pytest.mark.parametrize("seed", range(12))
def test_psa_invariants_on_random_configs(seed):
    cfg = _random_config(seed)
    out, trace = psa_run(cfg)
    assert check_result(out, cfg)
    for r in range(cfg.restarts):
        vals = trace.values(r)
        assert all(b > a for a, b in zip(vals, vals[1:]))
    # greedy augmentation of a maximal design is a no-op
    assert greedy_augment(out, cfg, np.random.default_rng(0)) == out
    again, trace2 = psa_run(cfg)
    assert again == out
    assert trace2.values() == trace.values()


@pytest.mark.parametrize("seed", range(6))
def test_oracle_bounds_psa(seed):
    crit = [LIN1, CriterionSpec.ARD(1, 1, (1,)), CriterionSpec.MaxPro(2)][seed % 3]
    cfg = cfg1(L=10, N=4, crit=crit, seed=seed)
    _, best = brute_best(cfg.space, cfg.spec, cfg.N, crit)
    out, trace = psa_run(cfg)
    assert trace.value <= best


def test_bench_trace_shape():
    cfg = PsaConfig(N=6, spec=PrivacySpec.bridge(1), criterion=CriterionSpec.D(ModelSpec.linear(2)),
                    space=GridSpace(2, 11), seed=5)
    bench = psa_bench(cfg, 1.0, 0.05)
    assert 15 <= len(bench.rows) <= 20
    vals = [v for _, v, _ in bench.rows]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert len(bench.restart_times) >= 1
    assert sum(f for _, _, f in bench.rows) >= 1
    assert check_result(bench.design, cfg)


def test_bench_zero_time_single_row():
    cfg = PsaConfig(N=6, spec=PrivacySpec.bridge(1), criterion=CriterionSpec.D(ModelSpec.linear(2)),
                    space=GridSpace(2, 11), seed=5)
    bench = psa_bench(cfg, 0.0, 0.05)
    assert len(bench.rows) == 1
    assert check_result(bench.design, cfg)
