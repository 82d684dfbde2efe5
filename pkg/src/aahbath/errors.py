"""Exception hierarchy shared by all modules."""


class AahBathError(Exception):
    """Base class for package errors."""


class DomainError(AahBathError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NumericalError(AahBathError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


class QuadratureError(NumericalError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class EigensolverError(NumericalError):
    pass


class InstabilityError(NumericalError):
    pass


class NonOscillatoryError(NumericalError):
    pass


class DegenerateRootError(NumericalError):
    pass


class RootRefinementWarning(UserWarning):
    """A bracketed sign change of the secular function did not refine to a root."""
