"""Exception types raised across the package."""

from __future__ import annotations

from typing import Any


class GpError(Exception):
    """Base class for solver and model errors."""


class GpDomainError(GpError, ValueError):
    """An argument lies outside the domain of the function (e.g. x <= 0)."""


class InfeasibleDualError(GpError):
    """The normality/orthogonality system has no nonnegative solution.

    For a posynomial program this means the primal infimum is not attained
    (typically the objective can be driven towards zero).
    """


class NonConvergedError(GpError):
    """An iterative method ran out of budget or failed its stopping test.

    ``best`` carries the best iterate found so far (its type depends on the
    raising routine), so callers can still inspect it.
    """

    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best


class DegenerateWeightsError(GpError):
    """Every primal-recovery equation was filtered out."""


class UnboundedBelowError(GpError):
    """The primal objective decreases without bound along a certified ray."""

    def __init__(self, message: str, ray: Any = None):
        super().__init__(message)
        self.ray = ray


class PrimalInfeasibleError(GpError):
    """No x > 0 satisfies the constraints."""


class CapExceededError(GpError):
    """A scenario sweep would exceed the combinatorial cap."""


class ParseError(GpError):
    """A problem document could not be read.

    ``path`` locates the offending field (``objective.terms[0].coef``),
    ``line`` is set for JSON syntax errors.
    """

    def __init__(self, message: str, path: str = "", line: int | None = None,
                 violations: list[str] | None = None):
        where = path or "<document>"
        if line is not None:
            where = f"line {line}: {where}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.violations = list(violations or [])
