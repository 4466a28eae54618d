# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled multitaper kernels.

Same contract as ``evospec._kernels_py``; inputs are validated and made
contiguous by the caller (``evospec.backend``).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def multitaper_grid(const double[::1] x, const long long[::1] centers,
                    const double[:, ::1] tapers, const double[::1] freqs):
    """Average of squared tapered transforms at every (block center, frequency).

    Returns an (I, J) array of (1/K) * sum_k |sum_v g_k(v) x(t+v) e^{-i w v}|^2
    with v the centered lag inside each block.
    """
    cdef Py_ssize_t I = centers.shape[0]
    cdef Py_ssize_t J = freqs.shape[0]
    cdef Py_ssize_t K = tapers.shape[0]
    cdef Py_ssize_t N = tapers.shape[1]
    cdef Py_ssize_t half = (N - 1) // 2
    cdef Py_ssize_t i, j, k, v
    cdef long long t
    cdef double re, im, gx, c, s, acc

    out_arr = np.empty((I, J), dtype=np.float64)
    cos_arr = np.empty((J, N), dtype=np.float64)
    sin_arr = np.empty((J, N), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] cos_t = cos_arr
    cdef double[:, ::1] sin_t = sin_arr

    for j in range(J):
        for v in range(N):
            cos_t[j, v] = cos(freqs[j] * (v - half))
            sin_t[j, v] = sin(freqs[j] * (v - half))

    for i in range(I):
        t = centers[i]
        for j in range(J):
            acc = 0.0
            for k in range(K):
                re = 0.0
                im = 0.0
                for v in range(N):
                    gx = tapers[k, v] * x[t - half + v]
                    re += gx * cos_t[j, v]
                    im -= gx * sin_t[j, v]
                acc += re * re + im * im
            out[i, j] = acc / K
    return out_arr
