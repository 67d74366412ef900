"""Exception hierarchy shared by all modules."""


class NonclassError(Exception):
    """Base class for errors raised by this package."""


class DomainError(NonclassError, ValueError):
    """Input outside the domain of an operation."""


class UnsupportedStateError(DomainError):
    """State kind not supported by the requested measure (e.g. mixed input)."""


class ResourceError(NonclassError):
    """A configured resource limit (such as the Fock cutoff) would be exceeded."""


class NumericError(NonclassError, ArithmeticError):
    """Floating-point evaluation failed or lost all precision."""


class SingularRegimeError(NumericError):
    """The R-function is not a regular function at the requested tau."""

    def __init__(self, message, tau=None, tau_singular=None):
        super().__init__(message)
        self.tau = tau
        self.tau_singular = tau_singular
