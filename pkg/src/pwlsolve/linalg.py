"""Dense, CSR-sparse and pentadiagonal-banded matrix storage with the
solve kernels the iteration schemes need.

Vectors are plain 1-D float64 numpy arrays; ``as_vector`` validates them at
public boundaries. All matrix payloads are made read-only at construction,
so instances are safe to share across threads.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import _kernels
from .errors import DimensionMismatchError, SingularMatrixError, ZeroDiagonalError

#: Relative pivot drop tolerance: a factorization pivot below
#: PIVOT_DROPTOL * max|A| raises SingularMatrixError.
PIVOT_DROPTOL = 1e-14


def as_vector(values, name: str = "vector") -> np.ndarray:
    v = np.array(values, dtype=np.float64, order="C")  # always a fresh copy
    if v.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class DenseMatrix:
    """Row-major dense matrix."""

    __slots__ = ("a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.float64, order="C")
        if a.ndim != 2:
            raise DimensionMismatchError(f"dense matrix must be 2-D, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("dense matrix contains non-finite entries")
        self.a = _freeze(a)

    @property
    def n_rows(self) -> int:
        return self.a.shape[0]

    @property
    def n_cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.a).copy()

    def to_dense(self) -> np.ndarray:
        return np.array(self.a)

    def __repr__(self):
        return f"DenseMatrix({self.n_rows}x{self.n_cols})"


class SparseMatrix:
    """Compressed sparse row matrix.

    Column indices are strictly increasing within each row; explicit zeros
    are allowed (splits keep band structure that way).
    """

    __slots__ = ("row_offsets", "col_indices", "values", "_shape")

    def __init__(self, n_rows, n_cols, row_offsets, col_indices, values):
        ro = np.array(row_offsets, dtype=np.int64, order="C")
        ci = np.array(col_indices, dtype=np.int64, order="C")
        va = np.array(values, dtype=np.float64, order="C")
        if ro.shape != (n_rows + 1,):
            raise DimensionMismatchError("row_offsets must have length n_rows+1")
        if ro[0] != 0 or ro[-1] != len(ci) or np.any(np.diff(ro) < 0):
            raise ValueError("row_offsets must be nondecreasing from 0 to nnz")
        if len(ci) != len(va):
            raise DimensionMismatchError("col_indices and values must have equal length")
        if len(ci) and (ci.min() < 0 or ci.max() >= n_cols):
            raise ValueError("column index out of bounds")
        if len(ci) > 1:
            same_row = np.repeat(np.arange(n_rows), np.diff(ro))
            bad = (np.diff(ci) <= 0) & (same_row[1:] == same_row[:-1])
            if np.any(bad):
                row = int(same_row[1:][bad][0])
                raise ValueError(f"column indices not strictly increasing in row {row}")
        if not np.all(np.isfinite(va)):
            raise ValueError("sparse matrix contains non-finite entries")
        self.row_offsets = _freeze(ro)
        self.col_indices = _freeze(ci)
        self.values = _freeze(va)
        self._shape = (int(n_rows), int(n_cols))

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        m = scipy.sparse.csr_matrix(m)
        m.sort_indices()
        return cls(m.shape[0], m.shape[1], m.indptr, m.indices, m.data)

    @property
    def n_rows(self) -> int:
        return self._shape[0]

    @property
    def n_cols(self) -> int:
        return self._shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def nnz(self) -> int:
        return len(self.values)

    def to_scipy(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(
            (self.values, self.col_indices, self.row_offsets), shape=self._shape
        )

    def diagonal(self) -> np.ndarray:
        return self.to_scipy().diagonal()

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def __repr__(self):
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


class PentaBandMatrix:
    """Symmetric matrix of order m**2 with bands at offsets 0, +-1 and +-m.

    Exactly the block-tridiagonal profile of a five-point stencil on an
    m-by-m grid; three vectors store the whole matrix. Entries of ``off1``
    at block boundaries must be zero (the stencil never couples across
    grid rows).
    """

    __slots__ = ("m", "diag", "off1", "offm", "symmetric")

    def __init__(self, m, diag, off1, offm, symmetric: bool = True):
        if not symmetric:
            raise ValueError("only symmetric banded storage is supported (three shared bands)")
        m = int(m)
        n = m * m
        diag = as_vector(diag, "diag")
        off1 = as_vector(off1, "off1")
        offm = as_vector(offm, "offm")
        if len(diag) != n or len(off1) != n - 1 or len(offm) != n - m:
            raise DimensionMismatchError(
                f"band lengths must be ({n}, {n - 1}, {n - m}) for grid side {m}"
            )
        self.m = m
        self.diag = _freeze(diag)
        self.off1 = _freeze(off1)
        self.offm = _freeze(offm)
        self.symmetric = True

    @property
    def n_rows(self) -> int:
        return self.m * self.m

    n_cols = n_rows

    @property
    def shape(self) -> tuple[int, int]:
        n = self.m * self.m
        return (n, n)

    def diagonal(self) -> np.ndarray:
        return self.diag.copy()

    def to_scipy(self) -> scipy.sparse.csr_matrix:
        n = self.m * self.m
        return scipy.sparse.diags(
            [self.offm, self.off1, self.diag, self.off1, self.offm],
            [-self.m, -1, 0, 1, self.m],
            shape=(n, n),
            format="csr",
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def __repr__(self):
        return f"PentaBandMatrix(m={self.m}, order={self.m * self.m})"


Matrix = DenseMatrix | SparseMatrix | PentaBandMatrix


def matvec(A: Matrix, x: np.ndarray) -> np.ndarray:
    """Return A @ x for any of the three storage kinds."""
    x = np.asarray(x, dtype=np.float64)
    if A.n_cols != len(x):
        raise DimensionMismatchError(f"matrix has {A.n_cols} columns, vector has {len(x)}")
    if isinstance(A, DenseMatrix):
        return A.a @ x
    if isinstance(A, SparseMatrix):
        return _kernels.csr_matvec(A.row_offsets, A.col_indices, A.values, x)
    if isinstance(A, PentaBandMatrix):
        return penta_matvec(A.diag, A.off1, A.offm, A.m, x)
    raise TypeError(f"unsupported matrix type {type(A).__name__}")


def penta_matvec(diag, off1, offm, m, x) -> np.ndarray:
    """Symmetric five-band matvec as shifted vector adds."""
    y = diag * x
    y[1:] += off1 * x[:-1]
    y[:-1] += off1 * x[1:]
    y[m:] += offm * x[:-m]
    y[:-m] += offm * x[m:]
    return y


def _check_square_system(A: Matrix, b: np.ndarray) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if A.n_rows != A.n_cols:
        raise DimensionMismatchError(f"matrix must be square, got {A.n_rows}x{A.n_cols}")
    if len(b) != A.n_rows:
        raise DimensionMismatchError(f"rhs has length {len(b)}, matrix order is {A.n_rows}")
    return b


def lu_solve(A: Matrix, b: np.ndarray, fill_reducing: bool = False,
             droptol: float = PIVOT_DROPTOL) -> np.ndarray:
    """Solve Ax = b by LU with partial pivoting.

    The sparse path optionally applies a fill-reducing minimum-degree
    permutation before factorizing (``fill_reducing=True``; default off —
    the Newton driver turns it on for CSR systems). A pivot magnitude
    below ``droptol * max|A|`` raises SingularMatrixError.
    """
    b = _check_square_system(A, b)
    if isinstance(A, DenseMatrix):
        return dense_lu_solve(A.a, b, droptol)
    if isinstance(A, SparseMatrix):
        return sparse_lu_solve(A.to_scipy(), b, fill_reducing, droptol)
    if isinstance(A, PentaBandMatrix):
        return penta_banded_solve(A.m, A.diag, A.off1, A.offm, b, droptol)
    raise TypeError(f"unsupported matrix type {type(A).__name__}")


def dense_lu_solve(a: np.ndarray, b: np.ndarray, droptol: float = PIVOT_DROPTOL) -> np.ndarray:
    scale = np.abs(a).max() if a.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy warns on exact zero pivots; we raise below
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diagonal(lu))
    worst = int(np.argmin(pivots)) if len(pivots) else 0
    if len(pivots) and pivots[worst] <= droptol * scale:
        raise SingularMatrixError(row=worst)
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def sparse_lu_solve(m, b: np.ndarray, fill_reducing: bool, droptol: float = PIVOT_DROPTOL) -> np.ndarray:
    scale = np.abs(m.data).max() if m.nnz else 0.0
    spec = "MMD_AT_PLUS_A" if fill_reducing else "NATURAL"
    try:
        lu = scipy.sparse.linalg.splu(m.tocsc(), permc_spec=spec)
    except RuntimeError as exc:  # SuperLU: "Factor is exactly singular"
        raise SingularMatrixError(str(exc)) from exc
    pivots = np.abs(lu.U.diagonal())
    worst = int(np.argmin(pivots)) if len(pivots) else 0
    if len(pivots) and pivots[worst] <= droptol * scale:
        raise SingularMatrixError(row=worst)
    return lu.solve(b)


def penta_banded_solve(m, diag, off1, offm, b, droptol: float = PIVOT_DROPTOL) -> np.ndarray:
    """Banded LU (LAPACK gbtrf/gbtrs) within the +-m band profile."""
    n = m * m
    ab = np.zeros((3 * m + 1, n))  # 2*kl + ku + 1 rows, kl = ku = m
    ab[2 * m, :] = diag
    ab[2 * m - 1, 1:] = off1
    ab[2 * m + 1, :-1] = off1
    ab[m, m:] = offm
    ab[3 * m, :-m] = offm
    scale = max(np.abs(diag).max(), np.abs(off1).max() if len(off1) else 0.0,
                np.abs(offm).max() if len(offm) else 0.0)
    gbtrf, gbtrs = scipy.linalg.get_lapack_funcs(("gbtrf", "gbtrs"), (ab, b))
    lu, ipiv, info = gbtrf(ab, m, m)
    if info > 0:
        raise SingularMatrixError(row=info - 1)
    pivots = np.abs(lu[2 * m, :])
    worst = int(np.argmin(pivots))
    if pivots[worst] <= droptol * scale:
        raise SingularMatrixError(row=worst)
    x, info = gbtrs(lu, m, m, b, ipiv)
    if info != 0:
        raise SingularMatrixError()
    return x


def forward_substitution(lower: Matrix, b: np.ndarray) -> np.ndarray:
    """Exact forward solve of Lx = b using the lower triangle of ``lower``.

    Entries above the diagonal are ignored (the argument is a
    lower-triangular view). A zero diagonal entry raises
    ZeroDiagonalError(i) — for the Gauss-Seidel-Newton system this signals
    sgn((x_i)+) + t_ii = 0 upstream.
    """
    b = _check_square_system(lower, b)
    if isinstance(lower, DenseMatrix):
        return _kernels.dense_lower_solve(lower.a, lower.diagonal(), b)
    if isinstance(lower, SparseMatrix):
        strict, diag = _split_lower_csr(lower)
        return _kernels.csr_lower_solve(
            strict.row_offsets, strict.col_indices, strict.values, diag, b
        )
    if isinstance(lower, PentaBandMatrix):
        strict = _penta_strict_triangle(lower, upper=False)
        return _kernels.csr_lower_solve(
            strict.row_offsets, strict.col_indices, strict.values, lower.diag, b
        )
    raise TypeError(f"unsupported matrix type {type(lower).__name__}")


def _split_lower_csr(A: SparseMatrix) -> tuple[SparseMatrix, np.ndarray]:
    """Strictly-lower part and diagonal of a CSR matrix (upper part dropped)."""
    s = A.to_scipy()
    return SparseMatrix.from_scipy(scipy.sparse.tril(s, k=-1, format="csr")), s.diagonal()


def _penta_strict_triangle(A: PentaBandMatrix, upper: bool) -> SparseMatrix:
    n, m = A.n_rows, A.m
    offsets = [1, m] if upper else [-1, -m]
    s = scipy.sparse.diags([A.off1, A.offm], offsets, shape=(n, n), format="csr")
    return SparseMatrix.from_scipy(s)


def diagonal_solve(d: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Componentwise solve of diag(d) x = b."""
    d = np.asarray(d, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if d.shape != b.shape:
        raise DimensionMismatchError(f"shapes {d.shape} and {b.shape} differ")
    zero = np.nonzero(d == 0.0)[0]
    if len(zero):
        raise ZeroDiagonalError(int(zero[0]))
    return b / d

