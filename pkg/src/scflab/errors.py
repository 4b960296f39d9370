"""Exception hierarchy shared by the scflab modules."""


class SCFError(Exception):
    """Base class for all scflab errors."""


class DomainError(SCFError, ValueError):
    """An argument lies outside the domain of an operation."""


class RegionError(DomainError):
    """A point lies in the wrong region of the (s1, s2) plane."""


class NumericalError(SCFError, ArithmeticError):
    """A quadrature, root find or integration failed to converge.

    ``estimate`` carries the best value reached, when one exists.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InfeasiblePathError(SCFError):
    """Biomass along a batch path reaches zero before the threshold."""


class NoViableFraction(SCFError):
    """No drain fraction in (0, 1) yields positive net growth per cycle."""


class NoPeriodicOrbit(SCFError):
    """The impulsive system has no periodic orbit for this drain fraction."""
