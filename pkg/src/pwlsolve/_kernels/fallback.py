"""Pure numpy/Python reference kernels.

These define the semantics the compiled kernels in ``_native`` must
reproduce (up to floating-point reassociation in the row dot products).
"""

import numpy as np

from ..errors import ZeroDiagonalError

NAME = "python"


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix given by its three arrays."""
    n = len(indptr) - 1
    y = np.zeros(n)
    for i in range(n):
        lo, hi = indptr[i], indptr[i + 1]
        if lo != hi:
            y[i] = np.dot(data[lo:hi], x[indices[lo:hi]])
    return y


def csr_lower_solve(indptr, indices, data, diag, rhs):
    """Solve (D + L) x = rhs with L strictly lower triangular in CSR form.

    ``diag`` carries the (possibly sign-shifted) diagonal; a zero entry
    raises ZeroDiagonalError identifying the row.
    """
    n = len(rhs)
    x = np.empty(n)
    for i in range(n):
        d = diag[i]
        if d == 0.0:
            raise ZeroDiagonalError(i)
        acc = rhs[i]
        for t in range(indptr[i], indptr[i + 1]):
            acc -= data[t] * x[indices[t]]
        x[i] = acc / d
    return x


def dense_lower_solve(lower, diag, rhs):
    """Solve (D + L) x = rhs with L a strictly lower triangular 2-D array."""
    n = len(rhs)
    x = np.empty(n)
    for i in range(n):
        d = diag[i]
        if d == 0.0:
            raise ZeroDiagonalError(i)
        x[i] = (rhs[i] - np.dot(lower[i, :i], x[:i])) / d
    return x
