# cython: language_level=3
"""Compiled kernels. Every loop accumulates in ascending index order so the
results agree bit for bit with :mod:`fracgrad._pykernels`."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def matmul(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t p = a.shape[0], m = a.shape[1], n = b.shape[1]
    cdef Py_ssize_t i, k, j
    cdef double aik
    out = np.zeros((p, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    for i in range(p):
        for k in range(m):
            aik = a[i, k]
            for j in range(n):
                c[i, j] = c[i, j] + aik * b[k, j]
    return out


def matmul_tn(const double[:, ::1] a, const double[:, ::1] b):
    """``a.T @ b`` without materialising the transpose."""
    cdef Py_ssize_t p = a.shape[0], m = a.shape[1], n = b.shape[1]
    cdef Py_ssize_t i, k, j
    cdef double aki
    out = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    for k in range(p):
        for i in range(m):
            aki = a[k, i]
            for j in range(n):
                c[i, j] = c[i, j] + aki * b[k, j]
    return out


def colsum(const double[:, ::1] g):
    cdef Py_ssize_t p = g.shape[0], n = g.shape[1]
    cdef Py_ssize_t k, j
    out = np.zeros((1, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    for k in range(p):
        for j in range(n):
            c[0, j] = c[0, j] + g[k, j]
    return out


def block11(const double[:, ::1] x, const double[::1] f, const double[::1] mf,
            const double[::1] ff, double b0):
    cdef Py_ssize_t p = x.shape[0], m = x.shape[1]
    cdef Py_ssize_t k, l
    cdef double s, xkl
    out = np.empty((p, m), dtype=np.float64)
    cdef double[:, ::1] d = out
    for k in range(p):
        s = 0.0
        for l in range(m):
            s = s + x[k, l] * f[l]
        for l in range(m):
            xkl = x[k, l]
            d[k, l] = xkl * mf[l] + ((s - xkl * f[l]) + b0) * ff[l]
    return out
