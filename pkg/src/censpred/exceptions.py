"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to converge or to bracket a root."""


class DegradedPrecisionWarning(RuntimeWarning):
    """Signed-mixture cancellation is too severe for the closed form."""
