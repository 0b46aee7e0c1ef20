"""Exception types shared across the package."""


class KarmaRoutingError(Exception):
    """Base class for all karma-routing errors."""


class DegenerateOptimumError(KarmaRoutingError):
    """The target flow has a zero component, so no conserving price exists."""


class InfeasibleHorizonError(KarmaRoutingError):
    """No admissible integer price pair exists for the given horizon."""


class InfeasibleKarmaError(KarmaRoutingError):
    """An agent's karma is below the feasibility floor of its planning problem."""


class InsufficientKarmaError(KarmaRoutingError):
    """A route was chosen whose toll exceeds the agent's current karma."""


class ConvergenceError(KarmaRoutingError):
    """An iterative solver failed to converge within its iteration budget."""
