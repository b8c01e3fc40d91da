"""Exception types shared across the statistical modules."""


class DegenerateVariance(ValueError):
    """A correlation was requested on a series with zero variance."""


class InsufficientData(ValueError):
    """Not enough data to form the requested statistic."""


class DomainError(ValueError):
    """Arguments outside the domain where the statistic is defined."""


class NonConvergence(RuntimeError):
    """An iterative fit hit its iteration cap."""
