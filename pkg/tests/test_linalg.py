import numpy as np
import pytest
from numpy.testing import assert_allclose

from pwlsolve import (
    DenseMatrix,
    DimensionMismatchError,
    PentaBandMatrix,
    SingularMatrixError,
    SparseMatrix,
    ZeroDiagonalError,
    diagonal_solve,
    forward_substitution,
    lu_solve,
    matvec,
)
from pwlsolve.linalg import penta_banded_solve

from conftest import csr_from_dense, random_nonsingular
from oracles import naive_forward_solve, naive_matvec


class TestMatvec:
    def test_identity(self):
        assert_allclose(matvec(DenseMatrix(np.eye(2)), [3.0, -1.0]), [3.0, -1.0])

    def test_dense_hand_value(self):
        a = DenseMatrix([[2.0, 0.5], [0.5, 2.0]])
        assert_allclose(matvec(a, [1.0, 1.0]), [2.5, 2.5])

    def test_csr_diagonal(self):
        m = csr_from_dense(np.diag([1.0, 2.0, 3.0]))
        assert_allclose(matvec(m, [1.0, 1.0, 1.0]), [1.0, 2.0, 3.0])

    def test_matches_naive_on_random(self, rng):
        a = rng.uniform(-1, 1, (7, 7))
        x = rng.uniform(-1, 1, 7)
        expected = naive_matvec(a, x)
        assert_allclose(matvec(DenseMatrix(a), x), expected, atol=1e-14)
        assert_allclose(matvec(csr_from_dense(a), x), expected, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            matvec(DenseMatrix(np.eye(2)), [1.0, 2.0, 3.0])


class TestLuSolve:
    def test_identity(self):
        x = lu_solve(DenseMatrix(np.eye(2)), [5.0, -2.0])
        assert_allclose(x, [5.0, -2.0])

    def test_hand_case(self):
        x = lu_solve(DenseMatrix([[2.0, 1.0], [1.0, 2.0]]), [3.0, 3.0])
        assert_allclose(x, [1.0, 1.0], atol=1e-14)

    def test_permutation_exercises_pivoting(self):
        x = lu_solve(DenseMatrix([[0.0, 1.0], [1.0, 0.0]]), [1.0, 2.0])
        assert_allclose(x, [2.0, 1.0])

    @pytest.mark.parametrize("n", [1, 5, 20, 50])
    def test_residual_bound_random(self, rng, n):
        a = random_nonsingular(rng, n)
        b = rng.uniform(-1, 1, n)
        for mat in (DenseMatrix(a), csr_from_dense(a)):
            x = lu_solve(mat, b)
            assert np.abs(a @ x - b).max() <= 1e-8 * (1.0 + np.abs(b).max())

    def test_sparse_fill_reducing_same_solution(self, rng):
        from pwlsolve import GenSpec, generate

        p = generate(GenSpec(n=200, kind="sparse", density=0.02, seed=6))
        b = rng.uniform(-1, 1, 200)
        x_amd = lu_solve(p.T, b, fill_reducing=True)
        x_nat = lu_solve(p.T, b, fill_reducing=False)
        assert_allclose(x_amd, x_nat, atol=1e-10)
        assert np.abs(p.T.to_dense() @ x_amd - b).max() <= 1e-10

    def test_singular_dense(self):
        with pytest.raises(SingularMatrixError):
            lu_solve(DenseMatrix([[1.0, 2.0], [2.0, 4.0]]), [1.0, 1.0])

    def test_singular_sparse(self):
        with pytest.raises(SingularMatrixError):
            lu_solve(csr_from_dense([[1.0, 1.0], [1.0, 1.0]]), [1.0, 0.0])

    def test_near_singular_drop_tolerance(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-16]])
        with pytest.raises(SingularMatrixError):
            lu_solve(DenseMatrix(a), [1.0, 1.0])

    def test_rhs_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            lu_solve(DenseMatrix(np.eye(2)), [1.0])


class TestForwardSubstitution:
    def test_hand_case(self):
        x = forward_substitution(DenseMatrix([[2.0, 0.0], [0.5, 2.0]]), [1.0, 1.0])
        assert_allclose(x, [0.5, 0.375])

    def test_identity_returns_rhs(self, rng):
        b = rng.uniform(-1, 1, 6)
        assert_allclose(forward_substitution(DenseMatrix(np.eye(6)), b), b)

    def test_unit_lower(self):
        x = forward_substitution(DenseMatrix([[1.0, 0.0], [1.0, 1.0]]), [1.0, 2.0])
        assert_allclose(x, [1.0, 1.0])

    def test_ignores_upper_triangle(self):
        full = DenseMatrix([[2.0, 99.0], [0.5, 2.0]])
        assert_allclose(forward_substitution(full, [1.0, 1.0]), [0.5, 0.375])

    @pytest.mark.parametrize("n", [3, 12, 40])
    def test_agrees_with_lu_solve(self, rng, n):
        lower = np.tril(rng.uniform(-1, 1, (n, n)))
        lower[np.diag_indices(n)] = rng.uniform(1.0, 2.0, n)
        b = rng.uniform(-1, 1, n)
        via_lu = lu_solve(DenseMatrix(lower), b)
        assert_allclose(forward_substitution(DenseMatrix(lower), b), via_lu, atol=1e-12)
        assert_allclose(forward_substitution(csr_from_dense(lower), b), via_lu, atol=1e-12)
        assert_allclose(naive_forward_solve(lower, b), via_lu, atol=1e-12)

    def test_zero_diagonal_reports_row(self):
        lower = DenseMatrix([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ZeroDiagonalError) as err:
            forward_substitution(lower, [1.0, 1.0])
        assert err.value.row == 1


class TestDiagonalSolve:
    def test_hand_case(self):
        assert_allclose(diagonal_solve(np.array([2.0, 2.0]), np.array([1.0, 1.0])), [0.5, 0.5])

    def test_ones_identity(self, rng):
        b = rng.uniform(-1, 1, 4)
        assert_allclose(diagonal_solve(np.ones(4), b), b)

    def test_one_dimensional(self):
        assert_allclose(diagonal_solve(np.array([-2.0]), np.array([3.0])), [-1.5])

    def test_zero_entry(self):
        with pytest.raises(ZeroDiagonalError) as err:
            diagonal_solve(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
        assert err.value.row == 1


def random_penta(rng, m):
    n = m * m
    off1 = rng.uniform(-1, 1, n - 1)
    off1[m - 1 :: m] = 0.0  # no coupling across grid-row blocks
    offm = rng.uniform(-1, 1, n - m)
    diag = rng.uniform(4.0, 6.0, n)
    return PentaBandMatrix(m, diag, off1, offm)


class TestPentaBand:
    @pytest.mark.parametrize("m", [2, 3, 5, 8])
    def test_matvec_matches_dense(self, rng, m):
        p = random_penta(rng, m)
        x = rng.uniform(-1, 1, m * m)
        assert np.abs(matvec(p, x) - p.to_dense() @ x).max() <= 1e-14

    @pytest.mark.parametrize("m", [2, 4, 7])
    def test_banded_solve_matches_dense_lu(self, rng, m):
        p = random_penta(rng, m)
        b = rng.uniform(-1, 1, m * m)
        x = penta_banded_solve(p.m, p.diag, p.off1, p.offm, b)
        assert_allclose(x, lu_solve(DenseMatrix(p.to_dense()), b), atol=1e-11)
        assert_allclose(lu_solve(p, b), x)

    def test_singular_banded(self):
        m = 3
        with pytest.raises(SingularMatrixError):
            penta_banded_solve(m, np.zeros(9), np.zeros(8), np.zeros(6), np.ones(9))

    def test_band_length_validation(self):
        with pytest.raises(DimensionMismatchError):
            PentaBandMatrix(3, np.ones(9), np.ones(9), np.ones(6))


class TestConstructorInvariants:
    def test_dense_rejects_nan(self):
        with pytest.raises(ValueError):
            DenseMatrix([[np.nan, 0.0], [0.0, 1.0]])

    def test_csr_rejects_bad_offsets(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [0, 2, 1], [0, 1], [1.0, 2.0])

    def test_csr_rejects_unsorted_columns(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [0, 2, 2], [1, 0], [1.0, 2.0])

    def test_csr_rejects_out_of_range_column(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [0, 1, 1], [5], [1.0])

    def test_payloads_are_read_only(self):
        m = DenseMatrix(np.eye(2))
        with pytest.raises(ValueError):
            m.a[0, 0] = 7.0
