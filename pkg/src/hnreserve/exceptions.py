"""Exception hierarchy.

Data problems (bad CSV, wrong triangle shape, nonpositive cells) derive from
:class:`TriangleError`; numerical problems (domain violations, missing
moments, quadrature failure) derive from :class:`NumericalError`. The CLI maps
the two families to distinct exit statuses.
"""


class ReservingError(Exception):
    """Base class for all errors raised by hnreserve."""


class TriangleError(ReservingError, ValueError):
    """Invalid triangle data."""


class FormatError(TriangleError):
    """Malformed CSV layout (bad header, ragged rows)."""


class ShapeError(TriangleError):
    """Observed cells do not form the upper-left development triangle."""


class CSVParseError(TriangleError):
    """A token could not be read as a number."""


class ValidationError(TriangleError):
    """A cell value violates the positivity rules."""


class ContractError(ReservingError, ValueError):
    """Arguments are inconsistent with each other (e.g. wrong factor count)."""


class NumericalError(ReservingError, ArithmeticError):
    """Base class for numerical failures."""


class DomainError(NumericalError, ValueError):
    """Argument outside the domain of a function."""


class MomentError(NumericalError):
    """A requested moment does not exist for the given parameters."""


class ConvergenceError(NumericalError):
    """Iterative routine did not converge.

    The best available estimate and its error estimate are kept so callers
    can decide whether it is good enough.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class GenerationError(NumericalError):
    """Simulation could not produce a valid cell."""
