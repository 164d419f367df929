"""Exception hierarchy shared by the library and the CLI."""


class CTVError(Exception):
    """Base class for all errors raised by ctvrpca."""

    kind = "error"


class ShapeError(CTVError, ValueError):
    kind = "shape_error"


class ArgumentError(CTVError, ValueError):
    kind = "argument_error"


class ConfigError(CTVError, ValueError):
    kind = "config_error"


class FormatError(CTVError, ValueError):
    kind = "format_error"


class DomainError(CTVError, ValueError):
    kind = "domain_error"


class NumericalError(CTVError, RuntimeError):
    """Linear-algebra failure inside a solver; carries the iteration index."""

    kind = "numerical_error"

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
