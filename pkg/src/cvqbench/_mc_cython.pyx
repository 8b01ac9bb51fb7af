# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo accumulation kernel.

Mirror of _mc_fallback.accumulate_chunk: same per-trial arithmetic in the
same order and the same pairwise halving-tree reduction, so both backends
return bit-identical partial sums for identical inputs. Keep the two files
in sync when changing either.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef double _tree_sum(double* buf, Py_ssize_t n) nogil:
    cdef Py_ssize_t half, odd, k
    if n == 0:
        return 0.0
    while n > 1:
        half = n // 2
        odd = n % 2
        for k in range(half):
            buf[k] = buf[2 * k] + buf[2 * k + 1]
        if odd:
            buf[half] = buf[n - 1]
        n = half + odd
    return buf[0]


def accumulate_chunk(double[::1] x_a, double[::1] p_a,
                     double[::1] base_x, double[::1] base_p,
                     unsigned char[::1] sel_x, unsigned char[::1] acc,
                     double[::1] n_out,
                     double k_x, double k_p, double s_x, double s_p,
                     double g_x, double g_p):
    """See _mc_fallback.accumulate_chunk for the contract."""
    cdef Py_ssize_t n = x_a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] scratch = np.empty(4 * n, dtype=np.float64)
    cdef double* d2x = &scratch[0]
    cdef double* d4x = &scratch[n]
    cdef double* d2p = &scratch[2 * n]
    cdef double* d4p = &scratch[3 * n]
    cdef Py_ssize_t j
    cdef double dev, d2, d4
    cdef long c_x = 0, c_p = 0
    cdef double s2x, s4x, s2p, s4p
    with nogil:
        for j in range(n):
            if sel_x[j]:
                dev = (k_x * base_x[j] + s_x * n_out[j]) - g_x * x_a[j]
            else:
                dev = (k_p * base_p[j] + s_p * n_out[j]) - g_p * p_a[j]
            d2 = dev * dev
            d4 = d2 * d2
            if sel_x[j] and acc[j]:
                d2x[j] = d2
                d4x[j] = d4
                c_x += 1
            else:
                d2x[j] = 0.0
                d4x[j] = 0.0
            if (not sel_x[j]) and acc[j]:
                d2p[j] = d2
                d4p[j] = d4
                c_p += 1
            else:
                d2p[j] = 0.0
                d4p[j] = 0.0
        s2x = _tree_sum(d2x, n)
        s4x = _tree_sum(d4x, n)
        s2p = _tree_sum(d2p, n)
        s4p = _tree_sum(d4p, n)
    return s2x, s4x, int(c_x), s2p, s4p, int(c_p), int(c_x + c_p)
