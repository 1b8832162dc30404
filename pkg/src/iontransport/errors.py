"""Exception hierarchy shared by all modules."""


class IonTransportError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(IonTransportError, ValueError):
    pass


class OutOfRangeError(IonTransportError, ValueError):
    pass


class InvalidGridError(IonTransportError, ValueError):
    pass


class OrderError(IonTransportError, ValueError):
    """Requested derivative order is not available for this object."""


class DomainError(IonTransportError, ValueError):
    pass


class InvalidForcingError(IonTransportError, ValueError):
    pass


class SingularityError(IonTransportError, ArithmeticError):
    pass


class ConvergenceError(IonTransportError, ArithmeticError):
    pass


class FiniteDifferenceError(IonTransportError, ArithmeticError):
    pass


class CoverageError(IonTransportError, ValueError):
    """Optimization window or transport leaves the electrode array."""


class NonConfiningError(IonTransportError, ValueError):
    pass


class GridMismatchError(IonTransportError, ValueError):
    pass


class ConfigError(IonTransportError, ValueError):
    pass
