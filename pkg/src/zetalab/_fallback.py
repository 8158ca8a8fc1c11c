"""Pure numpy implementations of the hot kernels.

Signatures mirror the compiled module ``zetalab._kernels``.
"""

from __future__ import annotations

import math

import numpy as np

_N_CHUNK = 4096


def rs_main_sum(alpha, beta, amp, counts, j0, delta, nu):
    """2 * sum_{n < counts[j]} amp[n] cos(alpha[n] + beta[n] h_j + nu[j]), h_j = (j0 + j) delta.

    The grid is folded into a (blocks x block_len) array so that the
    exponential sum becomes a complex matrix product.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    amp = np.asarray(amp, dtype=float)
    counts = np.asarray(counts)
    nu = np.asarray(nu, dtype=float)
    m = nu.size
    if m == 0:
        return np.zeros(0)
    n_full = int(counts.min())
    n_max = int(counts.max())
    block = max(1, math.isqrt(m - 1) + 1)
    n_blocks = -(-m // block)
    h_block = (j0 + np.arange(n_blocks) * block) * delta
    h_inner = np.arange(block) * delta
    s = np.zeros((n_blocks, block), dtype=complex)
    for lo in range(0, n_full, _N_CHUNK):
        hi = min(n_full, lo + _N_CHUNK)
        a = amp[lo:hi] * np.exp(1j * (alpha[lo:hi] + np.multiply.outer(h_block, beta[lo:hi])))
        b = np.exp(1j * np.multiply.outer(beta[lo:hi], h_inner))
        s += a @ b
    s = s.ravel()[:m]
    if n_max > n_full:
        h = (j0 + np.arange(m)) * delta
        for n in range(n_full, n_max):
            mask = counts > n
            s[mask] += amp[n] * np.exp(1j * (alpha[n] + beta[n] * h[mask]))
    return 2.0 * (s * np.exp(1j * nu)).real


def cue_log_abs_sum(u_phase, u_radius):
    """Row sums of log|1 - r_j e^{i phi_j}| for uniforms of shape (draws, n).

    Column j (0-based) uses r^2 = 1 - u^(1/j), a Beta(1, j) variate;
    column 0 has r = 1.  Each term is clamped below at -50.
    """
    u_phase = np.asarray(u_phase, dtype=float)
    u_radius = np.asarray(u_radius, dtype=float)
    n = u_phase.shape[1]
    expo = np.empty(n)
    expo[0] = 0.0
    expo[1:] = 1.0 / np.arange(1, n)
    # om = 1 - r^2; |1 - r e^{i phi}|^2 = (1 - r)^2 + 4 r sin^2(phi / 2)
    om = np.exp(np.log(u_radius) * expo)
    om[:, 0] = 0.0
    r = np.sqrt(1.0 - om)
    one_minus_r = om / (1.0 + r)
    half_sin = np.sin(np.pi * u_phase)
    mod2 = one_minus_r * one_minus_r + 4.0 * r * half_sin * half_sin
    with np.errstate(divide="ignore"):
        terms = 0.5 * np.log(mod2)
    np.maximum(terms, -50.0, out=terms)
    return terms.sum(axis=1)
