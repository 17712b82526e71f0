# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: CSR matvec and modified-diagonal forward sweeps."""

import numpy as np

cimport numpy as cnp

from ..errors import ZeroDiagonalError

NAME = "native"


def csr_matvec(const long long[:] indptr, const long long[:] indices,
               const double[:] data, const double[:] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef double[:] y = out
    cdef Py_ssize_t i, t
    cdef double acc
    for i in range(n):
        acc = 0.0
        for t in range(indptr[i], indptr[i + 1]):
            acc += data[t] * x[indices[t]]
        y[i] = acc
    return out


def csr_lower_solve(const long long[:] indptr, const long long[:] indices,
                    const double[:] data, const double[:] diag,
                    const double[:] rhs):
    cdef Py_ssize_t n = rhs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[:] x = out
    cdef Py_ssize_t i, t
    cdef double acc, d
    for i in range(n):
        d = diag[i]
        if d == 0.0:
            raise ZeroDiagonalError(i)
        acc = rhs[i]
        for t in range(indptr[i], indptr[i + 1]):
            acc -= data[t] * x[indices[t]]
        x[i] = acc / d
    return out


def dense_lower_solve(const double[:, :] lower, const double[:] diag,
                      const double[:] rhs):
    cdef Py_ssize_t n = rhs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[:] x = out
    cdef Py_ssize_t i, j
    cdef double acc, d
    for i in range(n):
        d = diag[i]
        if d == 0.0:
            raise ZeroDiagonalError(i)
        acc = rhs[i]
        for j in range(i):
            acc -= lower[i, j] * x[j]
        x[i] = acc / d
    return out
