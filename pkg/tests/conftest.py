import numpy as np
import pytest

from pwlsolve import DenseMatrix, PwlsProblem, SparseMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_nonsingular(rng, n, scale=1.0):
    """Well-conditioned random dense matrix (shifted to avoid tiny pivots)."""
    a = rng.uniform(-1.0, 1.0, (n, n)) * scale
    a += n * np.eye(n)
    return a


def dense_problem(t, b):
    return PwlsProblem(DenseMatrix(t), np.asarray(b, dtype=float))


def csr_from_dense(a):
    import scipy.sparse

    return SparseMatrix.from_scipy(scipy.sparse.csr_matrix(np.asarray(a, dtype=float)))
