# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-table kernels.

Loops run in pair-table order so that sums agree bitwise with the
NumPy backend (``np.bincount`` accumulates in input order too).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def gather_diff_scaled(double[::1] ext, long[::1] pair_i, long[::1] pair_j,
                       double scale, out=None):
    cdef Py_ssize_t n = pair_i.shape[0]
    if out is None:
        out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    for k in range(n):
        o[k] = (ext[pair_i[k]] - ext[pair_j[k]]) * scale
    return out


def scatter_mirror_diff(double[::1] q, long[::1] mirror, long[::1] pair_i,
                        double scale, Py_ssize_t n_rows):
    out = np.zeros(n_rows)
    cdef double[::1] o = out
    cdef Py_ssize_t k, n = pair_i.shape[0]
    for k in range(n):
        o[pair_i[k]] += q[mirror[k]] - q[k]
    cdef Py_ssize_t i
    for i in range(n_rows):
        o[i] *= scale
    return out


def row_sqsums(double[::1] q, long[::1] pair_i, Py_ssize_t n_rows):
    out = np.zeros(n_rows)
    cdef double[::1] o = out
    cdef Py_ssize_t k, n = pair_i.shape[0]
    for k in range(n):
        o[pair_i[k]] += q[k] * q[k]
    return out


def scale_by_row(double[::1] q, long[::1] pair_i, double[::1] factors,
                 out=None):
    cdef Py_ssize_t n = q.shape[0]
    if out is None:
        out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    for k in range(n):
        o[k] = q[k] * factors[pair_i[k]]
    return out
