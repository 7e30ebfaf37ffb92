"""Constrained space-filling designs on grids via privacy sets."""

from .criteria import (CriterionSpec, ModelSpec, ard_mean_reciprocal, efficiency, eval_ARD,
                       eval_D, eval_MaxPro, evaluate, info_matrix, nearest_distance_stats,
                       objective_value, regressor)
from .errors import (AvailabilityExhausted, ConfigurationError, DegenerateProjection,
                     EnumerationTooLarge, InfeasibleDesign, MaximalityViolation, PrivsetsError,
                     RejectionBudgetExceeded)
from .grid import (GridSpace, LinearConstraints, coord_of, delta_to_steps, in_region,
                   levels_for_delta)
from .oracle import EnumerationLimit, brute_best, enumerate_permissible
from .privacy import (AvailabilityMask, Design, PrivacySpec, in_privacy, is_permissible,
                      sample_outside_privacy)
from .psa import (PsaConfig, RunTrace, candidate_set, greedy_augment, local_tune, mutate,
                  psa_bench, psa_run)

__version__ = "0.1.0"
