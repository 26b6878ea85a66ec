"""Exception types raised across the package."""


class QconnError(Exception):
    """Base class for all package errors."""


class GridMismatchError(QconnError, ValueError):
    """Two objects live on incompatible grids."""


class SolverError(QconnError, RuntimeError):
    """A linear solve or matrix exponential failed."""


class NonUnitaryError(QconnError, ValueError):
    pass


class DomainError(QconnError, ValueError):
    """A wave packet left the trusted interior of the grid, or a sample violates a
    smallness precondition."""


class TransportError(QconnError, RuntimeError):
    pass


class CyclicSubstitutionError(QconnError, ValueError):
    pass


class InsufficientOrderError(QconnError, ValueError):
    """A truncated series cannot answer a question about the requested order."""
