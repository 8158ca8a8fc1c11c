# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Riemann-Siegel main sum.  The numpy equivalent lives in ``_fallback``."""

import numpy as np

from libc.math cimport cos, sin

from scipy.linalg.cython_blas cimport zgemm

cdef Py_ssize_t N_CHUNK = 4096


def rs_main_sum(const double[::1] alpha, const double[::1] beta, const double[::1] amp,
                const Py_ssize_t[::1] counts, Py_ssize_t j0, double delta,
                const double[::1] nu):
    """2 * sum_{n < counts[j]} amp[n] cos(alpha[n] + beta[n] h_j + nu[j]), h_j = (j0 + j) delta.

    Grid index j = J * block + r; the sum over n is S[J, r] = sum_n A[J, n] B[n, r]
    with A = amp e^{i(alpha + beta h_{J*block})} and B = e^{i beta r delta},
    a complex matrix product handed to BLAS.
    """
    cdef Py_ssize_t m = nu.shape[0]
    cdef Py_ssize_t j, n, r, bj, lo, hi, nc
    cdef Py_ssize_t n_full = m and counts[0]
    cdef Py_ssize_t n_max = 0
    for j in range(m):
        if counts[j] > n_max:
            n_max = counts[j]
        if counts[j] < n_full:
            n_full = counts[j]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    if m == 0:
        return out_arr
    cdef Py_ssize_t block = 1
    while block * block < m:
        block += 1
    cdef Py_ssize_t n_blocks = (m + block - 1) // block
    s_arr = np.zeros((n_blocks, block), dtype=np.complex128)
    a_arr = np.empty((n_blocks, min(N_CHUNK, max(n_full, 1))), dtype=np.complex128)
    b_arr = np.empty((min(N_CHUNK, max(n_full, 1)), block), dtype=np.complex128)
    cdef double complex[:, ::1] s = s_arr
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] b = b_arr
    cdef double complex rot, step, acc
    cdef double h, ph
    cdef double complex one = 1.0, beta_blas = 1.0
    cdef int bm, bn, bk, lda, ldb, ldc
    cdef char trans = b'N'
    with nogil:
        lo = 0
        while lo < n_full:
            hi = min(n_full, lo + N_CHUNK)
            nc = hi - lo
            for bj in range(n_blocks):
                h = (j0 + bj * block) * delta
                for n in range(nc):
                    ph = alpha[lo + n] + beta[lo + n] * h
                    a[bj, n] = amp[lo + n] * (cos(ph) + 1j * sin(ph))
            for n in range(nc):
                ph = beta[lo + n] * delta
                step = cos(ph) + 1j * sin(ph)
                rot = 1.0
                for r in range(block):
                    if r % 64 == 0:
                        ph = beta[lo + n] * (r * delta)
                        rot = cos(ph) + 1j * sin(ph)
                    b[n, r] = rot
                    rot = rot * step
            # row-major S (n_blocks x block) is column-major S^T; S^T += B^T A^T
            bm = <int>block
            bn = <int>n_blocks
            bk = <int>nc
            ldb = <int>block
            lda = <int>a.shape[1]
            ldc = <int>block
            zgemm(&trans, &trans, &bm, &bn, &bk, &one, &b[0, 0], &ldb, &a[0, 0], &lda,
                  &beta_blas, &s[0, 0], &ldc)
            lo = hi
        for j in range(m):
            acc = s[j // block, j % block]
            if counts[j] > n_full:
                h = (j0 + j) * delta
                for n in range(n_full, counts[j]):
                    ph = alpha[n] + beta[n] * h
                    acc = acc + amp[n] * (cos(ph) + 1j * sin(ph))
            out[j] = 2.0 * (acc.real * cos(nu[j]) - acc.imag * sin(nu[j]))
    return out_arr

