"""Space-filling designs in a region cut by a linear constraint.

Three 100-run Bridge designs on the region 0.5 x1 - x2 <= 0.5, each
optimized for average reciprocal distance over a different set of
projections, then cross-evaluated. Lower mean reciprocal distance is better;
each design should win (or nearly win) under its own projections.

    python demos/constrained_ard.py [seconds per design]
"""

import sys

from privsets import (CriterionSpec, GridSpace, LinearConstraints, PrivacySpec, PsaConfig,
                      ard_mean_reciprocal, delta_to_steps, levels_for_delta, psa_run)

budget = float(sys.argv[1]) if len(sys.argv) > 1 else 20.0
delta = 2 / 119
space = GridSpace(2, levels_for_delta(delta, 1), LinearConstraints([[0.5, -1.0]], [0.5]))
spec = PrivacySpec.bridge(delta_to_steps(space, delta))
Js = [(1,), (2,), (1, 2)]

designs = {}
for J in Js:
    cfg = PsaConfig(N=100, spec=spec, criterion=CriterionSpec.ARD(1, 1, J), space=space,
                    time_budget=budget, restarts=10 ** 6, seed=3)
    designs[J], _ = psa_run(cfg)

name = lambda J: "{" + ",".join(map(str, J)) + "}"
print("mean reciprocal distance (rows: evaluated under, columns: optimized for)")
print("        " + "".join(f"{name(J):>10}" for J in Js))
for K in Js:
    crit = CriterionSpec.ARD(1, 1, K)
    vals = [ard_mean_reciprocal(crit, designs[J], space) for J in Js]
    print(f"{name(K):>8}" + "".join(f"{v:10.4f}" for v in vals))
