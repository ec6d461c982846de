"""Exception hierarchy shared by all pascalwalk modules."""


class PascalwalkError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PascalwalkError):
    """Invalid user input: bad pmf, malformed path, unusable arguments."""


class DimensionError(ValidationError):
    """Operation only defined for a specific lattice dimension."""


class HorizonError(ValidationError):
    """Requested time horizon exceeds what the given data supports."""


class AliasingError(ValidationError):
    """Torus grid too small for the requested kernel (wrap-around)."""


class ResourceBudgetError(PascalwalkError):
    """A configured cell / path-count budget would be exceeded."""


class InvariantViolation(PascalwalkError):
    """A checked mathematical invariant failed.

    For the coupling this would falsify the bookkeeping the construction
    relies on, so it always carries a full state trace.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
