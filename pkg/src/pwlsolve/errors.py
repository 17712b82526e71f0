"""Exception types shared across the package."""


class PwlsolveError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(PwlsolveError, ValueError):
    """Operands have incompatible shapes."""


class SingularMatrixError(PwlsolveError):
    """A factorization met a pivot below the drop tolerance.

    ``row`` identifies the offending pivot position when known.
    """

    def __init__(self, message: str = "matrix is singular to working precision", row: int | None = None):
        super().__init__(message if row is None else f"{message} (row {row})")
        self.row = row


class ZeroDiagonalError(PwlsolveError):
    """A diagonal (or sign-shifted diagonal) entry is exactly zero.

    For the Jacobi/Gauss-Seidel sweeps this signals sgn((x_i)+) + t_ii = 0.
    """

    def __init__(self, row: int):
        super().__init__(f"zero diagonal entry at row {row}")
        self.row = row


class InvalidDiagonalError(PwlsolveError, ValueError):
    """A diagonal entry sits at an excluded value (0 or -1)."""


class DimensionTooLargeError(PwlsolveError, ValueError):
    """The exhaustive orthant oracle was asked for more than 2**20 patterns."""


class UnknownNameError(PwlsolveError, KeyError):
    """No built-in instance is registered under the requested name."""


class EmptyInputError(PwlsolveError, ValueError):
    """An operation that needs at least one record received none."""
