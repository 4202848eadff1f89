"""Exception and warning types raised across the package."""


class CohThermoError(Exception):
    """Base class for all package errors."""


class InvalidObservableError(CohThermoError, ValueError):
    """Matrix is not Hermitian (or not square) within tolerance."""


class InvalidStateError(CohThermoError, ValueError):
    """Matrix is not a valid density matrix."""


class ShapeError(CohThermoError, ValueError):
    pass


class ParameterError(CohThermoError, ValueError):
    pass


class PreconditionError(CohThermoError, ValueError):
    pass


class ConsistencyError(CohThermoError, ValueError):
    """Inputs that should agree (marginals, dimensions) do not."""


class SupportError(CohThermoError, ValueError):
    pass


class TruncationError(CohThermoError, RuntimeError):
    """A truncated basis is too small for the requested accuracy."""


class InvariantError(CohThermoError, ArithmeticError):
    """A numerical invariant was violated beyond tolerance."""


class TruncationWarning(UserWarning):
    pass


class LevelCrossingWarning(UserWarning):
    pass
