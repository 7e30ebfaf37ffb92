"""Small enough to enumerate: the search against the exact optimum.

On a 9-level line with three runs and neighbouring levels forbidden, every
permissible design is listed, the best one found exhaustively, and the
search is asked to find it from 50 random restarts.
"""

from privsets import (CriterionSpec, GridSpace, ModelSpec, PrivacySpec, PsaConfig, brute_best,
                      enumerate_permissible, psa_run)
from privsets.grid import coords

space = GridSpace(1, 9)
spec = PrivacySpec.bridge(1)
print(f"{sum(1 for _ in enumerate_permissible(space, spec, 3))} permissible 3-run designs")

for crit in (CriterionSpec.D(ModelSpec.linear(1)), CriterionSpec.ARD(1, 1, (1,)),
             CriterionSpec.MaxPro(2)):
    best, value = brute_best(space, spec, 3, crit)
    found, trace = psa_run(PsaConfig(N=3, spec=spec, criterion=crit, space=space, restarts=50, seed=0))
    pts = lambda des: coords(space, des.as_array(1)).ravel().tolist()
    status = "matches" if trace.value == value else "MISSES"
    print(f"{crit.label():>28}: exact {pts(best)}  search {pts(found)}  {status}")
