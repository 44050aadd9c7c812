"""Exceptions raised by PyWSEP solvers and searches."""


class NoPhysicalStatesError(RuntimeError):
    """No eigenpair passed the physicality filter."""


class PlateauError(RuntimeError):
    """The CAP-strength scan found no stable plateau of the decay rate."""


class ConvergenceError(RuntimeError):
    """An iterative procedure ran out of iterations."""


class BranchJumpError(ConvergenceError):
    """A self-consistent iteration lost track of the state it was following."""


class ContinuityError(RuntimeError):
    """Eigenpair continuation failed even after step refinement."""


class ConfigError(ValueError):
    """A configuration key is unknown, malformed or out of range."""
