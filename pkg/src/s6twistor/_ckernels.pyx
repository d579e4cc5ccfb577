# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``."""
import numpy as np


def signed_table_mul(x, y, idx, sgn):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:, ::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const Py_ssize_t[:, ::1] iv = np.ascontiguousarray(idx, dtype=np.intp)
    cdef const double[:, ::1] sv = np.ascontiguousarray(sgn, dtype=np.float64)
    cdef Py_ssize_t N = xv.shape[0], n = iv.shape[0]
    out = np.zeros((N, n))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r, i, j
    cdef double xi
    for r in range(N):
        for i in range(n):
            xi = xv[r, i]
            if xi == 0.0:
                continue
            for j in range(n):
                ov[r, iv[i, j]] += sv[i, j] * xi * yv[r, j]
    return out


def sparse_bilinear(a, b, out_idx, a_idx, b_idx, sign, Py_ssize_t out_len):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const Py_ssize_t[::1] oi = np.ascontiguousarray(out_idx, dtype=np.intp)
    cdef const Py_ssize_t[::1] ai = np.ascontiguousarray(a_idx, dtype=np.intp)
    cdef const Py_ssize_t[::1] bi = np.ascontiguousarray(b_idx, dtype=np.intp)
    cdef const double[::1] sg = np.ascontiguousarray(sign, dtype=np.float64)
    cdef Py_ssize_t N = av.shape[0], T = oi.shape[0]
    out = np.zeros((N, out_len))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r, t
    for r in range(N):
        for t in range(T):
            ov[r, oi[t]] += sg[t] * av[r, ai[t]] * bv[r, bi[t]]
    return out
