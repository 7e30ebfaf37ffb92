"""Bridge design for a full quadratic model in two factors.

Builds a 21-run design whose one-dimensional projections keep every pair of
levels at least 0.05 apart, reports its D value and writes a scatter plot
with marginal histograms.

    python demos/bridge_d_optimal.py [seconds]
"""

import sys
from pathlib import Path

import numpy as np

from privsets import (CriterionSpec, GridSpace, ModelSpec, PrivacySpec, PsaConfig, delta_to_steps,
                      eval_D, levels_for_delta, psa_run)
from privsets.grid import coords
from privsets.svg import design_svg

budget = float(sys.argv[1]) if len(sys.argv) > 1 else 10.0
delta = 0.05

# L = floor(2k/delta) + 1 with k = 1 puts a level on every multiple of delta
space = GridSpace(2, levels_for_delta(delta, 1))
spec = PrivacySpec.bridge(delta_to_steps(space, delta))
model = ModelSpec.full_quadratic(2)
print(f"grid: {space.L} levels per axis, privacy radius {spec.steps} steps")

cfg = PsaConfig(N=21, spec=spec, criterion=CriterionSpec.D(model), space=space,
                time_budget=budget, restarts=10 ** 6, seed=1)
design, trace = psa_run(cfg)
print(f"{len(trace.restart_values)} restarts in {budget:g} s, best restart {trace.best_restart}")
print(f"D value {eval_D(model, design, space):.6f}")

C = coords(space, design.as_array(2))
for a in range(2):
    gaps = np.diff(np.sort(C[:, a]))
    print(f"axis {a + 1}: smallest gap {gaps.min():.4f}")

out = Path("bridge_d_optimal.svg")
out.write_text(design_svg(C, title="21-run Bridge design, quadratic model"))
print(f"wrote {out}")
