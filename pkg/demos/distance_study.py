"""How well do designs cover the cube? Nearest-point distances in six factors.

Compares a D-optimal Bridge design, a MaxPro Latin hypercube and a plain
random Latin hypercube (32 runs each) by the distance from 10000 uniform
probes plus the 64 cube vertices to the closest design point.

    python demos/distance_study.py [seconds per design]
"""

import sys
from pathlib import Path

import numpy as np

from privsets import (CriterionSpec, Design, GridSpace, ModelSpec, PrivacySpec, PsaConfig, delta_to_steps,
                      eval_D, nearest_distance_stats, psa_run)
from privsets.criteria import cube_vertices, uniform_probes
from privsets.svg import boxplot_svg

budget = float(sys.argv[1]) if len(sys.argv) > 1 else 10.0
d, N = 6, 32
rng = np.random.default_rng(0)
probes = np.vstack([cube_vertices(d), uniform_probes(d, 10_000, rng)])
model = ModelSpec.linear(d)

designs = {}
# a Bridge design with half the LHD spacing, i.e. one step of a 63-level grid
space = GridSpace(d, 2 * N - 1)
spec = PrivacySpec.bridge(delta_to_steps(space, 1 / (N - 1)))
designs["Bridge D"] = (psa_run(PsaConfig(N=N, spec=spec, criterion=CriterionSpec.D(model), space=space,
                                         time_budget=budget, restarts=10 ** 6, seed=1))[0], space)
lhd = GridSpace(d, N)
designs["LHD MaxPro"] = (psa_run(PsaConfig(N=N, spec=PrivacySpec.lhd(), criterion=CriterionSpec.MaxPro(2),
                                           space=lhd, time_budget=budget, restarts=10 ** 6, seed=1))[0], lhd)
X = np.stack([rng.permutation(N) for _ in range(d)], axis=1)
designs["random LHD"] = (Design.from_array(X, N), lhd)

labels, dists, dvals = [], [], []
for label, (design, sp) in designs.items():
    s = nearest_distance_stats(design, sp, probes)
    D = eval_D(model, design, sp)
    print(f"{label:>11}: D={D:.4f}  distance median={s.median:.3f} q3={s.q3:.3f} max={s.max:.3f}")
    labels.append(label)
    dists.append(s.distances)
    dvals.append(D)

out = Path("distance_study.svg")
out.write_text(boxplot_svg(labels, dists, dvals, crit_label="D"))
print(f"wrote {out}")
