"""Exception hierarchy shared by the library and the command line.

Every class carries the exit code ``supoptics.cli`` returns for it.
"""


class SupOpticsError(Exception):
    """Base class: internal numerical failure unless a subclass says otherwise."""
    exit_code = 4


class ValidationFailure(SupOpticsError):
    exit_code = 1


class InvalidArgumentError(SupOpticsError, ValueError):
    exit_code = 2


class SizeLimitError(InvalidArgumentError):
    """Operator word or power beyond the configured bound."""


class OrderLimitError(InvalidArgumentError):
    """Moment order beyond what a provider (or cutoff margin) supports."""


class DegenerateStateError(SupOpticsError, ArithmeticError):
    """Normalization constant at or below 1e-300: the state is the zero vector."""
    exit_code = 3


class DegenerateDenominatorError(DegenerateStateError):
    """A printed closed form has a vanishing normalization."""


class UndefinedWitnessError(SupOpticsError, ArithmeticError):
    exit_code = 3


class ArithmeticOverflowError(SupOpticsError, OverflowError):
    exit_code = 4


class CutoffInfeasibleError(SupOpticsError):
    exit_code = 4


class InconsistentProviderError(SupOpticsError):
    exit_code = 4


class OutputError(SupOpticsError, OSError):
    exit_code = 5
