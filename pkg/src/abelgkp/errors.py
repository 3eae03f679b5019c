"""Exception hierarchy.

``InputError`` subclasses signal malformed or inadmissible input (CLI exit 2);
``ComputationError`` subclasses signal budget or tolerance failures (CLI exit 1).
"""


class GkpError(Exception):
    pass


class InputError(GkpError, ValueError):
    pass


class ComputationError(GkpError, RuntimeError):
    pass


class SchemaError(InputError):
    pass


class SingularBasis(InputError):
    pass


class NotSymplecticallyIntegral(InputError):
    pass


class NotSiegel(InputError):
    pass


class NotInDual(InputError):
    pass


class NotPauli(InputError):
    pass


class NotLogical(InputError):
    pass


class NotCommuting(InputError):
    pass


class InconsistentPhases(InputError):
    pass


class TrivialCode(InputError):
    pass


class BudgetExceeded(ComputationError):
    pass


class NumericalBreakdown(ComputationError):
    pass


class AutomorphyFailure(ComputationError):
    pass


class TruncationOverflow(ComputationError):
    pass


class GridTooCoarse(ComputationError):
    pass
