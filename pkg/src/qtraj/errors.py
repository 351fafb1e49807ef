"""Exception types shared across the package."""


class QtrajError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(QtrajError):
    """Operands with incompatible dimensions."""


class InvariantError(QtrajError):
    """A construction-time invariant was violated (norm, hermiticity, shape, ...)."""


class IntegrationError(QtrajError):
    """Numerical failure mid-run: blow-up or drift signaling that dt is too large."""


class GridError(QtrajError):
    """Time grid incompatible with a requested sampling (e.g. non-commensurate period)."""
