"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`AlmostSDError`, which the CLI maps to a machine-readable category.
"""


class AlmostSDError(ValueError):
    category = "error"


class KindMismatchError(AlmostSDError):
    category = "kind_mismatch"


class DomainError(AlmostSDError):
    category = "domain"


class PreconditionError(AlmostSDError):
    """Input data violates the preconditions of an order or operation."""

    category = "precondition"


class ParameterError(AlmostSDError):
    """Out-of-range tuning parameter (epsilon, alpha, a_n, quantile level ...)."""

    category = "parameter"


class ComputationError(AlmostSDError):
    category = "computation"


class InputError(AlmostSDError):
    """Unreadable or unusable input file."""

    category = "input"
