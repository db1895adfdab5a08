class FDensityError(Exception):
    """Base class for errors raised by this package."""


class DomainError(FDensityError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParameterError(FDensityError, ValueError):
    """A parameter violates the operation's precondition."""


class ConstructionError(FDensityError, RuntimeError):
    """A requested object could not be built from the given data."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ParseError(FDensityError, ValueError):
    """An expression could not be parsed."""

    def __init__(self, message, token=None, position=None):
        super().__init__(message)
        self.token = token
        self.position = position
