"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid game or scenario configuration."""


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed its state/profile budget."""


class InfeasibleSolutionError(RuntimeError):
    """A pinning solution with an empty feasible interval was used where a
    valid probability rule is required."""
