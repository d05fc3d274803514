"""Exception hierarchy.

The CLI maps ``InputError`` subclasses to exit code 2 and
``NumericalError`` subclasses to exit code 3.
"""


class LipmodError(Exception):
    """Base class for all package errors."""


class InputError(LipmodError, ValueError):
    """Malformed or inconsistent input."""


class DimensionError(InputError):
    pass


class PreconditionError(InputError):
    """An operation was called outside its stated domain."""


class InfeasibleError(PreconditionError):
    """A system expected to be consistent has an empty feasible set."""


class NumericalError(LipmodError, RuntimeError):
    """A solver failed to produce an answer it can certify."""


class SolverError(NumericalError):
    """Iteration limit or cycling guard exceeded.

    ``bound`` carries the best objective bound known when the solver gave up.
    """

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class DegenerateInstanceError(NumericalError):
    pass
