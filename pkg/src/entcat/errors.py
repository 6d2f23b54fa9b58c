"""Exception hierarchy.

Input errors (malformed matrices, bad arguments) derive from ``InputError``;
failures of a numerical precondition derive from ``PreconditionError``.
The CLI maps the two families to distinct exit codes.
"""


class EntcatError(Exception):
    """Base class for all toolkit errors."""


class InputError(EntcatError, ValueError):
    pass


class PreconditionError(EntcatError, ArithmeticError):
    pass


class InvalidMatrix(InputError):
    pass


class InvalidArgument(InputError):
    pass


class InvalidDistribution(InputError):
    pass


class UnsupportedRank(PreconditionError):
    pass


class Infeasible(PreconditionError):
    pass


class FormulaOutOfRange(PreconditionError):
    pass


class CatalystNotReturned(PreconditionError):
    pass


class BoundOutOfRange(PreconditionError):
    pass


class DegenerateKraus(PreconditionError):
    pass
