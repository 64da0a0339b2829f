"""Exception hierarchy shared by all treebellman modules.

Everything derives from TreeBellmanError so callers can catch the library
wholesale. The split mirrors how failures are handled: domain/feasibility
problems are caller errors (CLI exit code 1), while convergence and
consistency problems mean the numerics or the closed forms themselves are
in doubt (CLI exit code 2).
"""


class TreeBellmanError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TreeBellmanError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InfeasibleError(DomainError):
    """Problem parameters violate a feasibility constraint (e.g. f^p > F)."""


class BracketError(TreeBellmanError):
    """A root bracket does not straddle a sign change."""


class ConvergenceError(TreeBellmanError):
    """An iteration failed to reach its tolerance within max_iter."""


class ConsistencyError(TreeBellmanError):
    """Two independent computations of the same quantity disagree."""


class AccuracyError(TreeBellmanError):
    """A quadrature error estimate exceeds the requested tolerance."""


class SamplingError(TreeBellmanError):
    """The admissible sampler could not satisfy the moment constraints."""
