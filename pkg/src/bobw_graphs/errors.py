"""Exception hierarchy shared by all modules."""


class BobwError(Exception):
    """Base class for every error raised by this package."""


class BadParameterError(BobwError, ValueError):
    pass


# graph structure
class GraphError(BobwError):
    pass


class UncoverableTargetError(GraphError):
    """A target vertex has an empty in-neighbourhood, so nothing can cover it."""


class TooLargeError(GraphError):
    """Exact enumeration was requested on a graph above the configured cap."""


class InvalidDominatingSetError(GraphError):
    pass


# numerical solvers
class SolverError(BobwError):
    pass


class NonFiniteError(SolverError, ValueError):
    pass


class NoConvergenceError(SolverError):
    def __init__(self, message, *, bracket=None, residual=None, iterations=None):
        super().__init__(message)
        self.bracket = bracket
        self.residual = residual
        self.iterations = iterations


class BoundaryPointError(SolverError, ValueError):
    pass


# feedback / policies
class ZeroObservationProbabilityError(BobwError):
    pass


class PolicyGraphMismatchError(BobwError):
    """The policy cannot run on a graph of this observability class."""


class NotStronglyObservableError(PolicyGraphMismatchError):
    pass


class NotWeaklyObservableError(PolicyGraphMismatchError):
    pass


class EmptyV2Error(PolicyGraphMismatchError):
    pass


class SequencingViolationError(BobwError):
    pass


class InvariantViolationError(BobwError, AssertionError):
    """A per-round runtime invariant failed while running in debug mode."""


# environments / harness
class BudgetExceededError(BobwError):
    pass


class ScriptExhaustedError(BobwError):
    pass


class NoGroundTruthError(BobwError):
    pass


class MissingTraceFieldError(BobwError, KeyError):
    pass
