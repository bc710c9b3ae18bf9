"""Exception types shared across the library."""


class QCouplingError(Exception):
    """Base class for all library errors."""


class DomainError(QCouplingError):
    """Parameter outside the mathematical domain of an operation."""


class PoleInLowerParameter(QCouplingError):
    """A basic hypergeometric series hit a zero denominator parameter."""


class NonConvergent(QCouplingError):
    """A truncated sum exhausted max_terms before meeting its tolerance."""


class InsufficientTruncation(QCouplingError):
    """A truncated-space computation lost too much mass at the cutoff."""


class InsufficientWindow(QCouplingError):
    """An operator's interior support touches the truncation window edge."""


class PlanInvalid(QCouplingError):
    """A verification plan failed validation (unknown id, empty grid, bad q)."""
