# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twin of :mod:`greenhouse_rl._kernels.pure`.

Same contract: C-contiguous float64 arrays in, new arrays out.  Loops are
ordered so every inner loop runs stride-1 over a contiguous row, which lets
the C compiler vectorize them (including the tanh sweep, see the build
flags in setup.py).  For the small matrices used here this avoids the
fixed per-call overhead of the BLAS path while staying plain IEEE double
arithmetic.
"""

from libc.math cimport tanh

import numpy as np


def mlp_forward(
    double[:, ::1] x,
    double[:, ::1] w1,
    double[::1] b1,
    double[:, ::1] w2,
    double[::1] b2,
):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d_in = x.shape[1]
    cdef Py_ssize_t d_h = w1.shape[1]
    cdef Py_ssize_t d_out = w2.shape[1]

    y_arr = np.empty((n, d_out), dtype=np.float64)
    h_arr = np.empty((n, d_h), dtype=np.float64)
    cdef double[:, ::1] y = y_arr
    cdef double[:, ::1] h = h_arr
    cdef Py_ssize_t i, j, k
    cdef double v

    for i in range(n):
        for j in range(d_h):
            h[i, j] = b1[j]
        for k in range(d_in):
            v = x[i, k]
            for j in range(d_h):
                h[i, j] += v * w1[k, j]
        for j in range(d_h):
            h[i, j] = tanh(h[i, j])
        for j in range(d_out):
            y[i, j] = b2[j]
        for k in range(d_h):
            v = h[i, k]
            for j in range(d_out):
                y[i, j] += v * w2[k, j]
    return y_arr, h_arr


def mlp_backward(
    double[:, ::1] x,
    double[:, ::1] h,
    double[:, ::1] dy,
    double[:, ::1] w2,
):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d_in = x.shape[1]
    cdef Py_ssize_t d_h = h.shape[1]
    cdef Py_ssize_t d_out = dy.shape[1]

    dw1_arr = np.zeros((d_in, d_h), dtype=np.float64)
    db1_arr = np.zeros(d_h, dtype=np.float64)
    dw2_arr = np.zeros((d_h, d_out), dtype=np.float64)
    db2_arr = np.zeros(d_out, dtype=np.float64)
    dh_arr = np.empty(d_h, dtype=np.float64)
    cdef double[:, ::1] dw1 = dw1_arr
    cdef double[::1] db1 = db1_arr
    cdef double[:, ::1] dw2 = dw2_arr
    cdef double[::1] db2 = db2_arr
    cdef double[::1] dh = dh_arr
    cdef Py_ssize_t i, j, k
    cdef double acc, v

    for i in range(n):
        for j in range(d_out):
            db2[j] += dy[i, j]
        for j in range(d_h):
            acc = 0.0
            for k in range(d_out):
                acc += dy[i, k] * w2[j, k]
            dh[j] = acc * (1.0 - h[i, j] * h[i, j])
            db1[j] += dh[j]
        for k in range(d_h):
            v = h[i, k]
            for j in range(d_out):
                dw2[k, j] += v * dy[i, j]
        for k in range(d_in):
            v = x[i, k]
            for j in range(d_h):
                dw1[k, j] += v * dh[j]
    return dw1_arr, db1_arr, dw2_arr, db2_arr
