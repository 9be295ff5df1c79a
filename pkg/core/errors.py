# core/errors.py
# Exception hierarchy. Statuses (NotKkt, Inconclusive, Unbounded, ...) are
# result dataclasses, not exceptions; only genuine failures land here.


class VqfpError(Exception):
    """Base class for every error raised by the library."""


class DomainError(VqfpError):
    """A denominator g_i is not positive at the requested point."""


class DimensionError(VqfpError):
    pass


class ConvergenceError(VqfpError):
    pass


class NumericalError(VqfpError):
    pass


class InfeasiblePoint(VqfpError):
    def __init__(self, message: str, violated: list[int] | None = None):
        super().__init__(message)
        self.violated = violated or []


class InapplicableRoute(VqfpError):
    pass


class HypothesisNotMet(VqfpError):
    pass


class ConfigError(VqfpError):
    pass


class ParseError(VqfpError):
    pass


class ValidationError(VqfpError):
    """Instance data violates a model invariant.

    `invariant` names it ("symmetry", "psd", "g-positivity", "shape", "box"),
    `index` points at the offending objective or constraint.
    """

    def __init__(self, invariant: str, index: int | None, message: str):
        where = f" (index {index})" if index is not None else ""
        super().__init__(f"{invariant}{where}: {message}")
        self.invariant = invariant
        self.index = index
