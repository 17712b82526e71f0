"""Problem representation for x+ + Tx = b, the residual map, sign
patterns, and the D+L+U splitting shared by the iterative schemes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from . import _kernels
from .errors import DimensionMismatchError
from .linalg import (
    DenseMatrix,
    Matrix,
    PentaBandMatrix,
    SparseMatrix,
    _penta_strict_triangle,
    as_vector,
    matvec,
)


class PwlsProblem:
    """The pair (T, b) defining the system x+ + Tx = b."""

    __slots__ = ("T", "b")

    def __init__(self, T: Matrix, b):
        if T.n_rows != T.n_cols:
            raise DimensionMismatchError(f"T must be square, got {T.n_rows}x{T.n_cols}")
        b = as_vector(b, "b")
        if len(b) != T.n_rows:
            raise DimensionMismatchError(f"b has length {len(b)}, T has order {T.n_rows}")
        self.T = T
        self.b = b
        self.b.flags.writeable = False

    @property
    def n(self) -> int:
        return self.T.n_rows

    @property
    def kind(self) -> str:
        """Storage tag of T: 'dense', 'sparse' or 'penta'."""
        return {DenseMatrix: "dense", SparseMatrix: "sparse", PentaBandMatrix: "penta"}[type(self.T)]

    def __repr__(self):
        return f"PwlsProblem(n={self.n}, kind={self.kind!r})"


def positive_part(x: np.ndarray) -> np.ndarray:
    """x+ with components max(x_i, 0); x = positive_part(x) - negative_part(x)."""
    return np.maximum(x, 0.0)


def negative_part(x: np.ndarray) -> np.ndarray:
    """x- with components max(-x_i, 0)."""
    return np.maximum(-x, 0.0)


def sign_pattern(x: np.ndarray) -> np.ndarray:
    """Diagonal of diag(sgn(x+)) as a uint8 0/1 vector.

    Exactly zero components map to 0 — no epsilon band, so the pattern
    space stays finite and cycle detection is exact.
    """
    return (np.asarray(x) > 0).astype(np.uint8)


def pattern_key(s: np.ndarray) -> bytes:
    """Hashable key for a sign pattern."""
    return s.tobytes()


def residual(p: PwlsProblem, x: np.ndarray) -> np.ndarray:
    """F(x) = x+ + Tx - b."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) != p.n:
        raise DimensionMismatchError(f"x has length {len(x)}, problem order is {p.n}")
    return positive_part(x) + matvec(p.T, x) - p.b


class Splitting:
    """T = D + L + U with D the diagonal and L/U the strict triangles.

    ``lower`` and ``upper`` mirror T's storage (pentadiagonal triangles are
    materialized as CSR). The private arrays feed the sweep kernels.
    """

    __slots__ = ("T", "diag", "lower", "upper", "_lower_csr", "_upper_csr")

    def __init__(self, T: Matrix):
        self.T = T
        self.diag = T.diagonal()
        if isinstance(T, DenseMatrix):
            self.lower = DenseMatrix(np.tril(T.a, -1))
            self.upper = DenseMatrix(np.triu(T.a, 1))
            self._lower_csr = None
            self._upper_csr = None
        elif isinstance(T, SparseMatrix):
            s = T.to_scipy()
            self.lower = SparseMatrix.from_scipy(scipy.sparse.tril(s, k=-1, format="csr"))
            self.upper = SparseMatrix.from_scipy(scipy.sparse.triu(s, k=1, format="csr"))
            self._lower_csr = self.lower
            self._upper_csr = self.upper
        elif isinstance(T, PentaBandMatrix):
            self.lower = _penta_strict_triangle(T, upper=False)
            self.upper = _penta_strict_triangle(T, upper=True)
            self._lower_csr = self.lower
            self._upper_csr = self.upper
        else:
            raise TypeError(f"unsupported matrix type {type(T).__name__}")

    def offdiag_matvec(self, x: np.ndarray) -> np.ndarray:
        """(L + U) x, computed as Tx - Dx."""
        return matvec(self.T, x) - self.diag * x

    def upper_matvec(self, x: np.ndarray) -> np.ndarray:
        if isinstance(self.T, DenseMatrix):
            return self.upper.a @ x
        return matvec(self._upper_csr, x)

    def lower_solve(self, diag_mod: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Solve (diag(diag_mod) + L) x = rhs by forward substitution."""
        if isinstance(self.T, DenseMatrix):
            return _kernels.dense_lower_solve(self.T.a, diag_mod, rhs)
        lo = self._lower_csr
        return _kernels.csr_lower_solve(
            lo.row_offsets, lo.col_indices, lo.values, diag_mod, rhs
        )


def split_dlu(T: Matrix) -> Splitting:
    """Entrywise split of a square matrix into D + L + U."""
    if T.n_rows != T.n_cols:
        raise DimensionMismatchError(f"T must be square, got {T.n_rows}x{T.n_cols}")
    return Splitting(T)


def componentwise_certificate(
    p: PwlsProblem, x_prev: np.ndarray, x_next: np.ndarray
) -> np.ndarray:
    """Indices i with sgn((x_next,i)+) = sgn((x_prev,i)+).

    When x_next is the Newton iterate produced from x_prev, every returned
    index has F_i(x_next) = 0 (up to factorization roundoff), so matching
    components are already solved.
    """
    agree = sign_pattern(x_next) == sign_pattern(x_prev)
    return np.nonzero(agree)[0]


class SolveStatus(enum.Enum):
    CONVERGED = "converged"
    CYCLE_DETECTED = "cycle_detected"
    MAX_ITERATIONS = "max_iterations"
    SINGULAR_STEP = "singular_step"


@dataclass
class SolveOptions:
    """Driver options; defaults follow the experimental setup (residual
    2-norm tolerance 1e-5, at most 1000 iterations)."""

    tolerance: float = 1e-5
    max_iterations: int = 1000
    record_trace: bool = False
    cycle_detection: bool = True  # Newton only; ignored by the sweeps

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class SolveReport:
    """Outcome of one solver run."""

    status: SolveStatus
    x: np.ndarray
    iterations: int
    residual_norms: list[float]  # ||F(x_k)||_2 for k = 0..iterations
    wall_time: float
    method: str = ""
    cycle_length: int | None = None
    cycle_points: list[np.ndarray] | None = None
    failure_iteration: int | None = None
    failure_row: int | None = None
    pattern_trace: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def final_residual(self) -> float:
        return self.residual_norms[-1]

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED

    def to_json_dict(self) -> dict:
        out = {
            "status": self.status.value,
            "method": self.method,
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "residual_norms": [float(r) for r in self.residual_norms],
            "wall_time_s": self.wall_time,
        }
        if self.cycle_length is not None:
            out["cycle_length"] = self.cycle_length
            out["cycle_points"] = [pt.tolist() for pt in self.cycle_points or []]
        if self.failure_iteration is not None:
            out["failure_iteration"] = self.failure_iteration
            out["failure_row"] = self.failure_row
        return out
