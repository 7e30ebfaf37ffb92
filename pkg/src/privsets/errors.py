"""Exception hierarchy shared by the design construction modules."""


class PrivsetsError(Exception):
    """Base class for all library errors."""


class ConfigurationError(PrivsetsError, ValueError):
    """Inconsistent grid, spacing or criterion parameters."""


class AvailabilityExhausted(PrivsetsError):
    """Some axis has no unblocked level left, so no point can be added."""


class RejectionBudgetExceeded(PrivsetsError):
    """Rejection sampling hit its per-point attempt cap."""


class MaximalityViolation(PrivsetsError):
    """A maximal permissible design stopped short of the requested size.

    Raised when greedy augmentation cannot reach ``N`` points, which means the
    grid is too coarse for the requested run count.
    """

    def __init__(self, achieved, required, reason=""):
        self.achieved = achieved
        self.required = required
        msg = (f"maximal permissible design has {achieved} points, {required} required; "
               "use a denser grid or a smaller spacing")
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class DegenerateProjection(PrivsetsError, ValueError):
    """Two design points coincide on a projection used by a distance criterion."""


class EnumerationTooLarge(PrivsetsError):
    """Brute-force enumeration exceeded its node cap."""


class InfeasibleDesign(PrivsetsError):
    """No permissible design of the requested size exists."""
