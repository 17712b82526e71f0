"""Solvability conditions, closed-form diagonal enumeration, the
exhaustive orthant oracle, and the fixed-point maps used as test
instruments."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .core import PwlsProblem, Splitting, negative_part, positive_part, sign_pattern
from .errors import DimensionTooLargeError, InvalidDiagonalError
from .linalg import DenseMatrix, Matrix, PentaBandMatrix, SparseMatrix, lu_solve, matvec

BRUTE_FORCE_MAX_N = 20
_DENSIFY_LIMIT = 3000


@dataclass
class DominanceReport:
    """Strong diagonal dominance: max_i (1 + sum_{j!=i} |t_ij|) / |t_ii| < 1."""

    holds: bool
    worst_row_ratio: float


@dataclass
class SassenfeldReport:
    """Per-row beta_i of the strong Sassenfeld recursion and the max."""

    betas: np.ndarray
    beta: float
    holds: bool


class DiagonalVerdict(enum.Enum):
    NO_SOLUTION = "no_solution"
    SOLUTIONS = "solutions"


@dataclass
class DiagonalClassification:
    """Outcome of the closed-form enumeration for diagonal T.

    ``r`` counts indices with b_i > 0 and t_ii in (-1, 0); the solution
    count is 2**r, enumerated when that stays within ``cap``.
    """

    verdict: DiagonalVerdict
    r: int
    solutions: list[np.ndarray] | None


def _offdiag_abs_sums(T: Matrix) -> tuple[np.ndarray, np.ndarray]:
    """(sum_{j!=i} |t_ij| per row, diagonal)."""
    d = T.diagonal()
    if isinstance(T, DenseMatrix):
        total = np.abs(T.a).sum(axis=1)
    else:
        s = T.to_scipy()
        total = np.asarray(np.abs(s).sum(axis=1)).ravel()
    return total - np.abs(d), d


def strong_diagonal_dominance(T: Matrix) -> DominanceReport:
    """Row-ratio test; a zero diagonal yields holds=False with ratio=inf."""
    off, d = _offdiag_abs_sums(T)
    with np.errstate(divide="ignore"):
        ratios = np.where(d != 0.0, (1.0 + off) / np.abs(d), np.inf)
    worst = float(np.max(ratios))
    return DominanceReport(holds=bool(worst < 1.0), worst_row_ratio=worst)


def sassenfeld(T: Matrix) -> SassenfeldReport:
    """Forward beta recursion, row by row.

    beta_1 scales 1 plus the first row's off-diagonal absolute sum by
    |t_11|; later rows weight already-computed betas on their lower part.
    A zero diagonal makes the recursion infinite from that row on.
    """
    n = T.n_rows
    d = T.diagonal()
    betas = np.empty(n)
    if isinstance(T, DenseMatrix):
        a = np.abs(T.a)
        rows = [(np.arange(n), a[i]) for i in range(n)]
    else:
        s = T.to_scipy()
        rows = [
            (s.indices[s.indptr[i] : s.indptr[i + 1]], np.abs(s.data[s.indptr[i] : s.indptr[i + 1]]))
            for i in range(n)
        ]
    for i in range(n):
        if d[i] == 0.0:
            betas[i:] = np.inf
            break
        cols, vals = rows[i]
        low = cols < i
        acc = 1.0 + float(vals[low] @ betas[cols[low]]) + float(vals[cols > i].sum())
        betas[i] = acc / abs(d[i])
        if not np.isfinite(betas[i]):
            betas[i:] = np.inf
            break
    beta = float(np.max(betas))
    return SassenfeldReport(betas=betas, beta=beta, holds=bool(beta < 1.0))


def is_spd(T: Matrix) -> bool:
    """Symmetric (to 1e-12 relative) with a successful positive-pivot
    Cholesky factorization."""
    if T.n_rows != T.n_cols:
        return False
    if isinstance(T, PentaBandMatrix):
        # structurally symmetric; banded Cholesky within the profile
        m, n = T.m, T.n_rows
        ab = np.zeros((m + 1, n))
        ab[m, :] = T.diag
        ab[m - 1, 1:] = T.off1
        ab[0, m:] = T.offm
        try:
            scipy.linalg.cholesky_banded(ab, lower=False, check_finite=False)
            return True
        except scipy.linalg.LinAlgError:
            return False
    if isinstance(T, SparseMatrix) and T.n_rows > _DENSIFY_LIMIT:
        s = T.to_scipy()
        asym = abs(s - s.T)
        scale = max(1.0, np.abs(s.data).max() if s.nnz else 0.0)
        if asym.nnz and asym.max() > 1e-12 * scale:
            return False
        try:
            lam = scipy.sparse.linalg.eigsh(s, k=1, which="SA", return_eigenvectors=False)
        except Exception:
            return False
        return bool(lam[0] > 0.0)
    a = T.to_dense() if not isinstance(T, DenseMatrix) else T.a
    scale = max(1.0, np.abs(a).max() if a.size else 0.0)
    if np.abs(a - a.T).max() > 1e-12 * scale:
        return False
    try:
        np.linalg.cholesky(a)
        return True
    except np.linalg.LinAlgError:
        return False


def _diagonal_values(T: Matrix, b: np.ndarray) -> np.ndarray:
    d = T.diagonal()
    off, _ = _offdiag_abs_sums(T)
    if np.any(off != 0.0):
        raise ValueError("T must be a diagonal matrix")
    if len(d) != len(b):
        raise ValueError("dimension mismatch between T and b")
    return d


def diagonal_classify(T: Matrix, b: np.ndarray, cap: int = 1 << 12) -> DiagonalClassification:
    """Classify x+ + Tx = b for diagonal T by the componentwise branch
    tables: no solution iff some t_ii in (-1,0) has b_i < 0; otherwise the
    2**r combinations of b_i/t_ii vs b_i/(1+t_ii) over the ambiguous
    indices enumerate every solution."""
    b = np.asarray(b, dtype=np.float64)
    d = _diagonal_values(T, b)
    if np.any((d == 0.0) | (d == -1.0)):
        bad = int(np.nonzero((d == 0.0) | (d == -1.0))[0][0])
        raise InvalidDiagonalError(f"t_{bad}{bad} is in {{0, -1}}; classification undefined")

    interior = (d > -1.0) & (d < 0.0)
    if np.any(interior & (b < 0.0)):
        return DiagonalClassification(DiagonalVerdict.NO_SOLUTION, 0, None)

    base = np.empty(len(b))
    pos = d > 0.0
    neg = d < -1.0
    base[pos] = np.where(b[pos] <= 0.0, b[pos] / d[pos], b[pos] / (1.0 + d[pos]))
    base[neg] = np.where(b[neg] <= 0.0, b[neg] / (1.0 + d[neg]), b[neg] / d[neg])
    base[interior] = 0.0  # b_i = 0 here: both branches coincide at 0

    ambiguous = np.nonzero(interior & (b > 0.0))[0]
    r = len(ambiguous)
    if (1 << r) > cap:
        return DiagonalClassification(DiagonalVerdict.SOLUTIONS, r, None)
    solutions = []
    for choices in itertools.product((0, 1), repeat=r):
        x = base.copy()
        for i, c in zip(ambiguous, choices):
            x[i] = b[i] / d[i] if c == 0 else b[i] / (1.0 + d[i])
        solutions.append(x)
    return DiagonalClassification(DiagonalVerdict.SOLUTIONS, r, solutions)


def brute_force_solutions(p: PwlsProblem, chunk: int = 4096) -> list[np.ndarray]:
    """Every solution of x+ + Tx = b by exhausting the 2**n sign patterns.

    For each pattern s, the candidate (diag(s)+T)^{-1} b is accepted iff
    its own sign pattern reproduces s; singular patterns contribute no
    candidate. Results are deduplicated (infinity-distance below
    1e-9*(1+||b||_inf)) in pattern order. Desk-scale oracle: n <= 20.
    """
    n = p.n
    if n > BRUTE_FORCE_MAX_N:
        raise DimensionTooLargeError(f"brute force capped at n={BRUTE_FORCE_MAX_N}, got {n}")
    a = p.T.to_dense()
    b = p.b
    tol = 1e-9 * (1.0 + np.abs(b).max() if len(b) else 1.0)
    idx = np.arange(n)
    accepted: list[np.ndarray] = []
    total = 1 << n
    for start in range(0, total, chunk):
        pats = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        s = ((pats[:, None] >> idx[None, :].astype(np.uint64)) & 1).astype(np.float64)
        batch = np.broadcast_to(a, (len(pats), n, n)).copy()
        batch[:, idx, idx] += s
        try:
            ys = np.linalg.solve(batch, np.broadcast_to(b, (len(pats), n))[..., None])[..., 0]
        except np.linalg.LinAlgError:
            ys = np.full((len(pats), n), np.nan)
            for t in range(len(pats)):
                try:
                    ys[t] = np.linalg.solve(batch[t], b)
                except np.linalg.LinAlgError:
                    pass  # singular pattern: no candidate
        ok = np.all((ys > 0).astype(np.float64) == s, axis=1)
        ok &= np.all(np.isfinite(ys), axis=1)
        for t in np.nonzero(ok)[0]:
            y = ys[t]
            if np.abs(positive_part(y) + a @ y - b).max() > tol:
                continue
            if not any(np.abs(y - prev).max() <= tol for prev in accepted):
                accepted.append(y)
    return accepted


def full_fixed_point_map(p: PwlsProblem, x: np.ndarray) -> np.ndarray:
    """The map x -> (T+Id)^{-1}(b - x-); its fixed points solve the system.

    A contraction with factor 1/(lambda_min(T)+1) when T is symmetric
    positive definite.
    """
    n = p.n
    if isinstance(p.T, DenseMatrix):
        shifted = DenseMatrix(p.T.a + np.eye(n))
    elif isinstance(p.T, PentaBandMatrix):
        shifted = PentaBandMatrix(p.T.m, p.T.diag + 1.0, p.T.off1, p.T.offm)
    else:
        shifted = SparseMatrix.from_scipy(p.T.to_scipy() + scipy.sparse.identity(n))
    return lu_solve(shifted, p.b - negative_part(x))


def gauss_seidel_fixed_point_map(p: PwlsProblem, split: Splitting, x: np.ndarray) -> np.ndarray:
    """The map x -> (D+L)^{-1}(-Ux + b - x+) by forward substitution.

    A contraction in the infinity norm with factor beta under the strong
    Sassenfeld condition; fixed points solve the system.
    """
    rhs = p.b - split.upper_matvec(x) - positive_part(x)
    return split.lower_solve(split.diag, rhs)


def check_cycle(points: list[np.ndarray], p: PwlsProblem, tol: float | None = None) -> bool:
    """True iff (P(x_i)+T) x_{i+1} = b holds cyclically over the list."""
    if len(points) < 2:
        raise ValueError("a cycle needs at least two points")
    if tol is None:
        tol = 1e-9 * (1.0 + np.abs(p.b).max())
    for cur, nxt in zip(points, points[1:] + points[:1]):
        s = sign_pattern(cur).astype(np.float64)
        lhs = matvec(p.T, nxt) + s * nxt
        if np.abs(lhs - p.b).max() > tol:
            return False
    return True
