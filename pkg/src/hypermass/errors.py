"""Exception types shared across the package."""


class HypermassError(Exception):
    """Base class for all library errors."""


class DomainError(HypermassError):
    """Evaluation point lies at or outside the domain of a profile."""


class NonConvergenceError(HypermassError):
    """An improper integral or limit ladder failed to converge."""


class RegularityError(HypermassError):
    """A level value is not regular (|f'| below the regularity threshold)."""


class ZeroMassError(HypermassError):
    """An operation requiring positive mass received a (near-)zero mass."""


class EntireProfileError(HypermassError):
    """An operation requiring a minimal inner boundary received an entire profile."""


class HypothesisViolation(HypermassError):
    """A geometric hypothesis (curvature sign, mean-convexity, ...) fails on the grid.

    Carries the first counterexample found as ``.where`` / ``.value``.
    """

    def __init__(self, message, where=None, value=None):
        super().__init__(message)
        self.where = where
        self.value = value
