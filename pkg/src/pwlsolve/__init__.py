"""Toolkit for the piecewise linear system x+ + Tx = b.

Three iterations (semi-smooth Newton, Jacobi-Newton, Gauss-Seidel-Newton),
solvability analysis, problem transforms (absolute value equation,
cone-constrained QP), seeded instance generators with the canonical
counterexamples, a benchmark harness with performance profiles, and a
Boussinesq aquifer simulation built on the pentadiagonal storage.
"""

from ._kernels import active_backend, available_backends, use_backend
from .analysis import (
    DiagonalClassification,
    DiagonalVerdict,
    DominanceReport,
    SassenfeldReport,
    brute_force_solutions,
    check_cycle,
    diagonal_classify,
    full_fixed_point_map,
    gauss_seidel_fixed_point_map,
    is_spd,
    sassenfeld,
    strong_diagonal_dominance,
)
from .core import (
    PwlsProblem,
    SolveOptions,
    SolveReport,
    SolveStatus,
    Splitting,
    componentwise_certificate,
    negative_part,
    positive_part,
    residual,
    sign_pattern,
    split_dlu,
)
from .errors import (
    DimensionMismatchError,
    DimensionTooLargeError,
    EmptyInputError,
    InvalidDiagonalError,
    PwlsolveError,
    SingularMatrixError,
    UnknownNameError,
    ZeroDiagonalError,
)
from .generators import CanonicalInstance, GenKind, GenSpec, canonical, generate
from .linalg import (
    DenseMatrix,
    PentaBandMatrix,
    SparseMatrix,
    diagonal_solve,
    forward_substitution,
    lu_solve,
    matvec,
)
from .solvers import (
    Method,
    gauss_seidel_newton_step,
    jacobi_newton_step,
    newton_step,
    solve,
)
from .transforms import (
    AveProblem,
    KktReport,
    QpProblem,
    ave_to_pwls,
    kkt_check,
    pwls_to_ave,
    qp_to_pwls,
)

__version__ = "0.1.0"

__all__ = [
    "AveProblem",
    "CanonicalInstance",
    "DenseMatrix",
    "DiagonalClassification",
    "DiagonalVerdict",
    "DimensionMismatchError",
    "DimensionTooLargeError",
    "DominanceReport",
    "EmptyInputError",
    "GenKind",
    "GenSpec",
    "InvalidDiagonalError",
    "KktReport",
    "Method",
    "PentaBandMatrix",
    "PwlsProblem",
    "PwlsolveError",
    "QpProblem",
    "SassenfeldReport",
    "SingularMatrixError",
    "SolveOptions",
    "SolveReport",
    "SolveStatus",
    "SparseMatrix",
    "Splitting",
    "UnknownNameError",
    "ZeroDiagonalError",
    "active_backend",
    "available_backends",
    "ave_to_pwls",
    "brute_force_solutions",
    "canonical",
    "check_cycle",
    "componentwise_certificate",
    "diagonal_classify",
    "diagonal_solve",
    "forward_substitution",
    "full_fixed_point_map",
    "gauss_seidel_fixed_point_map",
    "gauss_seidel_newton_step",
    "generate",
    "is_spd",
    "jacobi_newton_step",
    "kkt_check",
    "lu_solve",
    "matvec",
    "negative_part",
    "newton_step",
    "positive_part",
    "pwls_to_ave",
    "qp_to_pwls",
    "residual",
    "sassenfeld",
    "sign_pattern",
    "solve",
    "split_dlu",
    "strong_diagonal_dominance",
    "use_backend",
]
