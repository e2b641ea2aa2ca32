"""Exception hierarchy shared by every solver in the package."""


class ZenoError(Exception):
    """Base class for all errors raised by :mod:`zenomatch`."""


class InvalidParameters(ZenoError, ValueError):
    """Physical parameters violate a construction invariant."""


class InvalidReduction(ZenoError):
    """Adiabatic elimination is undefined (Gamma = Delta_tilde = 0, Omega > 0)."""


class InfiniteLifetime(ZenoError):
    """Continuous measurement with zero effective decay never detects the atom."""


class NeverDetected(ZenoError):
    """Pulsed measurement with P2 = 0: the excited state is never found."""


class NoSolution(ZenoError):
    """Requested target is outside the range reachable by the model."""


class SingularStep(ZenoError):
    """A Newton denominator vanished."""


class NonConvergence(ZenoError):
    """An iterative solver exhausted its budget.

    Attributes
    ----------
    best : float or None
        Best iterate found before giving up.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class StepBudgetExceeded(ZenoError):
    """Fixed-step propagation would need more steps than allowed."""
