# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled CUE sampler loop; built with vectorized libm where available.

Each row is processed as a sequence of simple elementwise loops so the
compiler can map exp/log/sin onto SIMD math routines.
"""

import numpy as np

from libc.math cimport sin, log, exp, sqrt, M_PI
from libc.stdlib cimport malloc, free

# |1 - gamma|^2 floor; 0.5 * log(e^-100) = -50 is the per-term clamp
cdef double MOD2_FLOOR = 3.720075976020836e-44


def cue_log_abs_sum(const double[:, ::1] u_phase, const double[:, ::1] u_radius):
    """Row sums of log|1 - r_j e^{i phi_j}|; see ``_fallback.cue_log_abs_sum``."""
    cdef Py_ssize_t draws = u_phase.shape[0]
    cdef Py_ssize_t n = u_phase.shape[1]
    cdef Py_ssize_t i, j
    cdef double r, omr, acc
    if u_radius.shape[0] != draws or u_radius.shape[1] != n:
        raise ValueError("u_phase and u_radius must have the same shape")
    out_arr = np.empty(draws)
    cdef double[::1] out = out_arr
    if n == 0:
        out_arr[:] = 0.0
        return out_arr
    inv_arr = np.zeros(n)
    cdef double[::1] inv = inv_arr
    for j in range(1, n):
        inv[j] = 1.0 / j
    cdef double *om = <double *> malloc(3 * n * sizeof(double))
    if om == NULL:
        raise MemoryError()
    cdef double *hs = om + n
    cdef double *m2 = om + 2 * n
    with nogil:
        for i in range(draws):
            for j in range(n):
                om[j] = exp(log(u_radius[i, j]) * inv[j])
            for j in range(n):
                hs[j] = sin(M_PI * u_phase[i, j])
            for j in range(n):
                r = sqrt(1.0 - om[j])
                omr = om[j] / (1.0 + r)
                m2[j] = omr * omr + 4.0 * r * hs[j] * hs[j]
            # column 0 has r = 1 exactly
            m2[0] = 4.0 * hs[0] * hs[0]
            for j in range(n):
                if m2[j] < MOD2_FLOOR:
                    m2[j] = MOD2_FLOOR
            for j in range(n):
                m2[j] = log(m2[j])
            acc = 0.0
            for j in range(n):
                acc += m2[j]
            out[i] = 0.5 * acc
    free(om)
    return out_arr
