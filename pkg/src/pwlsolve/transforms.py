"""Bridges between x+ + Tx = b and its absolute-value-equation and
nonnegativity-constrained-QP forms."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .core import PwlsProblem
from .errors import DimensionMismatchError, SingularMatrixError
from .linalg import (
    PIVOT_DROPTOL,
    DenseMatrix,
    Matrix,
    PentaBandMatrix,
    SparseMatrix,
    as_vector,
)


@dataclass
class AveProblem:
    """The absolute value equation T_hat x - |x| = b_hat."""

    T_hat: Matrix
    b_hat: np.ndarray

    def __post_init__(self):
        self.b_hat = as_vector(self.b_hat, "b_hat")
        if self.T_hat.n_rows != self.T_hat.n_cols or self.T_hat.n_rows != len(self.b_hat):
            raise DimensionMismatchError("T_hat must be square with matching b_hat")


@dataclass
class QpProblem:
    """minimize (1/2) x'Qx + q'x over the nonnegative orthant."""

    Q: DenseMatrix
    q: np.ndarray

    def __post_init__(self):
        if not isinstance(self.Q, DenseMatrix):
            self.Q = DenseMatrix(self.Q.to_dense() if hasattr(self.Q, "to_dense") else self.Q)
        self.q = as_vector(self.q, "q")
        a = self.Q.a
        if a.shape[0] != a.shape[1] or a.shape[0] != len(self.q):
            raise DimensionMismatchError("Q must be square with matching q")
        scale = max(1.0, np.abs(a).max() if a.size else 0.0)
        if np.abs(a - a.T).max() > 1e-12 * scale:
            raise ValueError("Q must be symmetric")


@dataclass
class KktReport:
    feasible: bool
    max_violation: float


def _affine_matrix(T: Matrix, scale: float, shift: float) -> Matrix:
    """scale*T + shift*I in the same storage kind."""
    if isinstance(T, DenseMatrix):
        a = scale * T.a
        np.fill_diagonal(a, np.diagonal(a) + shift)
        return DenseMatrix(a)
    if isinstance(T, PentaBandMatrix):
        return PentaBandMatrix(T.m, scale * T.diag + shift, scale * T.off1, scale * T.offm)
    s = scale * T.to_scipy()
    if shift != 0.0:
        s = s + shift * scipy.sparse.identity(T.n_rows)
    return SparseMatrix.from_scipy(s)


def _require_nonsingular(T: Matrix) -> None:
    if isinstance(T, DenseMatrix):
        a = T.a
        scale = np.abs(a).max() if a.size else 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lu, _ = scipy.linalg.lu_factor(a, check_finite=False)
        pivots = np.abs(np.diagonal(lu))
        worst = int(np.argmin(pivots))
        if pivots[worst] <= PIVOT_DROPTOL * scale:
            raise SingularMatrixError(row=worst)
        return
    import scipy.sparse.linalg as spla

    m = T.to_scipy().tocsc()
    try:
        lu = spla.splu(m)
    except RuntimeError as exc:
        raise SingularMatrixError(str(exc)) from exc
    pivots = np.abs(lu.U.diagonal())
    scale = np.abs(m.data).max() if m.nnz else 0.0
    worst = int(np.argmin(pivots))
    if pivots[worst] <= PIVOT_DROPTOL * scale:
        raise SingularMatrixError(row=worst)


def pwls_to_ave(p: PwlsProblem) -> AveProblem:
    """T_hat = -2T - Id, b_hat = -2b; both systems share their solutions
    (substitute x+ = (x + |x|)/2)."""
    return AveProblem(_affine_matrix(p.T, -2.0, -1.0), -2.0 * p.b)


def ave_to_pwls(a: AveProblem) -> PwlsProblem:
    """Inverse map T = -(T_hat + Id)/2, b = -b_hat/2.

    Raises SingularMatrixError when T_hat + Id is singular (the resulting
    T would not define a well-posed system).
    """
    T = _affine_matrix(a.T_hat, -0.5, -0.5)
    _require_nonsingular(T)
    return PwlsProblem(T, -0.5 * a.b_hat)


def qp_to_pwls(qp: QpProblem) -> PwlsProblem:
    """T = (Q - Id)^{-1} and b = -Tq.

    With this sign convention the projection z = x+ of the system's
    solution satisfies Qz + q = x- >= 0 with z >= 0 and z'(Qz+q) = 0,
    exactly the first-order conditions of the QP (kkt_check verifies).
    Raises SingularMatrixError when 1 is an eigenvalue of Q.
    """
    n = len(qp.q)
    shifted = qp.Q.a - np.eye(n)
    scale = np.abs(shifted).max() if shifted.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(shifted, check_finite=False)
    pivots = np.abs(np.diagonal(lu))
    worst = int(np.argmin(pivots))
    if pivots[worst] <= PIVOT_DROPTOL * scale:
        raise SingularMatrixError(row=worst)
    t = scipy.linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)
    return PwlsProblem(DenseMatrix(t), -(t @ qp.q))


def kkt_check(qp: QpProblem, z: np.ndarray) -> KktReport:
    """Componentwise first-order check for the nonnegativity-constrained QP.

    Requires z >= -tol, Qz + q >= -tol and |z_i (Qz+q)_i| <= tol with
    tol = 1e-8*(1 + ||q||_inf); reports the largest violation found.
    """
    z = np.asarray(z, dtype=np.float64)
    if len(z) != len(qp.q):
        raise DimensionMismatchError("z has wrong length")
    tol = 1e-8 * (1.0 + np.abs(qp.q).max())
    grad = qp.Q.a @ z + qp.q
    violation = max(
        float(np.max(-z, initial=0.0)),
        float(np.max(-grad, initial=0.0)),
        float(np.max(np.abs(z * grad), initial=0.0)),
    )
    return KktReport(feasible=bool(violation <= tol), max_violation=violation)
