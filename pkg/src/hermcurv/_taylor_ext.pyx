# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled truncated-Taylor product.

The product table lists every pair of monomials (I[t], J[t]) whose sum is a
monomial K[t] of admissible degree; the product is a scatter-add over it.
"""

import numpy as np


def truncated_mul(const double complex[::1] a, const double complex[::1] b,
                  const Py_ssize_t[::1] I, const Py_ssize_t[::1] J,
                  const Py_ssize_t[::1] K, Py_ssize_t size):
    out = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] c = out
    cdef Py_ssize_t t, nt = I.shape[0]
    with nogil:
        for t in range(nt):
            c[K[t]] = c[K[t]] + a[I[t]] * b[J[t]]
    return out


def truncated_mul_many(const double complex[:, ::1] a, const double complex[:, ::1] b,
                       const Py_ssize_t[::1] I, const Py_ssize_t[::1] J,
                       const Py_ssize_t[::1] K, Py_ssize_t size):
    """Row-wise products of two stacks of coefficient vectors."""
    cdef Py_ssize_t rows = a.shape[0]
    out = np.zeros((rows, size), dtype=np.complex128)
    cdef double complex[:, ::1] c = out
    cdef Py_ssize_t r, t, nt = I.shape[0]
    with nogil:
        for r in range(rows):
            for t in range(nt):
                c[r, K[t]] = c[r, K[t]] + a[r, I[t]] * b[r, J[t]]
    return out
