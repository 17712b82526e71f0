"""The semi-smooth Newton, Jacobi-Newton and Gauss-Seidel-Newton
iterations with a shared driver (stopping rule, cycle detection,
failure classification)."""

from __future__ import annotations

import enum
import time

import numpy as np
import scipy.sparse

from .core import (
    PwlsProblem,
    SolveOptions,
    SolveReport,
    SolveStatus,
    Splitting,
    residual,
    sign_pattern,
    split_dlu,
)
from .errors import SingularMatrixError, ZeroDiagonalError
from .linalg import (
    DenseMatrix,
    PentaBandMatrix,
    SparseMatrix,
    as_vector,
    dense_lu_solve,
    diagonal_solve,
    penta_banded_solve,
    sparse_lu_solve,
)


class Method(enum.Enum):
    NEWTON = "newton"
    JACOBI_NEWTON = "jacobi-newton"
    GS_NEWTON = "gs-newton"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown method {value!r}; expected one of: {names}") from None


def _penta_zero_rows(T: PentaBandMatrix) -> np.ndarray:
    """Mask of rows whose entire T-row vanishes (dry cells in the aquifer
    discretization). Their scalar equation x_i+ = b_i decouples."""
    m = T.m
    rowmax = np.abs(T.diag).copy()
    off1, offm = np.abs(T.off1), np.abs(T.offm)
    rowmax[1:] = np.maximum(rowmax[1:], off1)
    rowmax[:-1] = np.maximum(rowmax[:-1], off1)
    rowmax[m:] = np.maximum(rowmax[m:], offm)
    rowmax[:-m] = np.maximum(rowmax[:-m], offm)
    return rowmax == 0.0


def _sweep_diag(p: PwlsProblem, s: np.ndarray) -> np.ndarray:
    """sgn(x+) + diag(T), with the closed-form unit pivot on decoupled
    all-zero rows of pentadiagonal problems (so x_i = b_i there instead of
    a spurious zero division)."""
    d = s.astype(np.float64) + p.T.diagonal()
    if isinstance(p.T, PentaBandMatrix):
        bump = _penta_zero_rows(p.T) & (d == 0.0)
        if np.any(bump):
            d = d.copy()
            d[bump] = 1.0
    return d


def newton_step(p: PwlsProblem, x: np.ndarray) -> np.ndarray:
    """Solve (P(x) + T) y = b for the next iterate.

    P is never materialized: 1 is added to diagonal entries where the
    pattern is active, preserving sparse and banded profiles. Raises
    SingularMatrixError when (P(x)+T) is singular for this orthant.
    """
    s = sign_pattern(x).astype(np.float64)
    T, b = p.T, p.b
    if isinstance(T, DenseMatrix):
        a = T.a.copy()
        np.fill_diagonal(a, np.diagonal(a) + s)
        return dense_lu_solve(a, b)
    if isinstance(T, SparseMatrix):
        shifted = T.to_scipy() + scipy.sparse.diags(s)
        return sparse_lu_solve(shifted, b, fill_reducing=True)
    if isinstance(T, PentaBandMatrix):
        d = T.diag + s
        zero = _penta_zero_rows(T) & (d == 0.0)
        if np.any(zero):
            d = d.copy()
            d[zero] = 1.0
        return penta_banded_solve(T.m, d, T.off1, T.offm, b)
    raise TypeError(f"unsupported matrix type {type(T).__name__}")


def jacobi_newton_step(p: PwlsProblem, split: Splitting, x: np.ndarray) -> np.ndarray:
    """One diagonal-system step: (P(x)+D) y = -(L+U)x + b. Cost O(nnz)."""
    s = sign_pattern(x)
    rhs = p.b - split.offdiag_matvec(x)
    return diagonal_solve(_sweep_diag(p, s), rhs)


def gauss_seidel_newton_step(p: PwlsProblem, split: Splitting, x: np.ndarray) -> np.ndarray:
    """One forward-substitution step: (P(x)+D+L) y = -Ux + b. Cost O(nnz)."""
    s = sign_pattern(x)
    rhs = p.b - split.upper_matvec(x)
    return split.lower_solve(_sweep_diag(p, s), rhs)


def solve(
    p: PwlsProblem,
    method: Method | str = Method.NEWTON,
    x0: np.ndarray | None = None,
    opts: SolveOptions | None = None,
) -> SolveReport:
    """Iterate the chosen scheme until ||F(x)||_2 <= tolerance.

    Outcomes: CONVERGED; CYCLE_DETECTED when a Newton sign pattern repeats
    without convergence (the iterate is a function of the pattern alone, so
    detection is exact; cycle length is the distance between repeats and
    the cycle's points are attached to the report); MAX_ITERATIONS; or
    SINGULAR_STEP wrapping a failed factorization with its iteration and
    row. For the Jacobi/Gauss-Seidel sweeps the iterate depends on the full
    previous point, so cycle detection does not apply and only
    max_iterations bounds the run.

    Newton also stops as soon as two consecutive sign patterns coincide:
    matching components are already exact, no residual pass needed.
    """
    method = Method.parse(method)
    opts = opts or SolveOptions()
    x = np.zeros(p.n) if x0 is None else as_vector(x0, "x0")
    if len(x) != p.n:
        raise ValueError(f"x0 has length {len(x)}, problem order is {p.n}")

    t0 = time.perf_counter()
    history = [float(np.linalg.norm(residual(p, x)))]
    trace = [sign_pattern(x)] if opts.record_trace else None

    def report(status, iterations, **extra):
        return SolveReport(
            status=status,
            x=x,
            iterations=iterations,
            residual_norms=history,
            wall_time=time.perf_counter() - t0,
            method=method.value,
            pattern_trace=trace,
            **extra,
        )

    if history[0] <= opts.tolerance:
        return report(SolveStatus.CONVERGED, 0)

    newton = method is Method.NEWTON
    split = None if newton else split_dlu(p.T)
    track_cycles = newton and opts.cycle_detection
    if track_cycles:
        seen = {sign_pattern(x).tobytes(): 0}
        iterates = [x.copy()]

    for k in range(1, opts.max_iterations + 1):
        s_prev = sign_pattern(x)
        try:
            if newton:
                x_new = newton_step(p, x)
            elif method is Method.JACOBI_NEWTON:
                x_new = jacobi_newton_step(p, split, x)
            else:
                x_new = gauss_seidel_newton_step(p, split, x)
        except (SingularMatrixError, ZeroDiagonalError) as exc:
            return report(
                SolveStatus.SINGULAR_STEP, k, failure_iteration=k,
                failure_row=getattr(exc, "row", None),
            )
        history.append(float(np.linalg.norm(residual(p, x_new))))
        s_new = sign_pattern(x_new)
        if opts.record_trace:
            trace.append(s_new)
        x = x_new

        if (newton and np.array_equal(s_new, s_prev)) or history[-1] <= opts.tolerance:
            return report(SolveStatus.CONVERGED, k)

        if track_cycles:
            key = s_new.tobytes()
            if key in seen:
                j = seen[key]
                return report(
                    SolveStatus.CYCLE_DETECTED, k,
                    cycle_length=k - j, cycle_points=iterates[j:k],
                )
            seen[key] = k
            iterates.append(x.copy())

    return report(SolveStatus.MAX_ITERATIONS, opts.max_iterations)
