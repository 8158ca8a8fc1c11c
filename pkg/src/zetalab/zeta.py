"""Riemann-Siegel evaluation of Z(t) = +-|zeta(1/2 + it)| on uniform grids.

A grid centred at tau with spacing delta is evaluated in one pass.  For
the main sum every phase theta(tau + h) - (tau + h) log n is split as

    [theta(tau) - tau log n]  +  h (theta'(tau) - log n)  +  nu(h)

where the first bracket is reduced modulo 2 pi in double-double arithmetic
and nu(h) is the (small, n-independent) curvature of theta.  What remains
is an exponential sum over a uniform grid, which the kernels in
``_kernels`` / ``_fallback`` compute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _backend, _rs_coeffs
from ._dd import LOG_TABLE, t_log_n_mod_2pi
from .special import riemann_siegel_theta_prime

__all__ = [
    "LOG_ABS_FLOOR",
    "T_MIN",
    "GridSpec",
    "ZetaSample",
    "count_sign_changes",
    "grid_spec",
    "grid_spacing",
    "half_width",
    "interval_max",
    "interval_maxima",
    "riemann_siegel_Z",
    "riemann_von_mangoldt",
    "z_on_grid",
    "zeta_euler_maclaurin",
]

T_MIN = 1e5
LOG_ABS_FLOOR = -50.0
_TWO_PI = 2.0 * math.pi
_POLY = np.polynomial.polynomial
_C0 = np.array(_rs_coeffs.C0)
_C1 = np.array(_rs_coeffs.C1)
_C2 = np.array(_rs_coeffs.C2)


@dataclass(frozen=True)
class GridSpec:
    t_center: float
    half_width: float
    spacing: float
    n_points: int

    @property
    def k_max(self) -> int:
        return (self.n_points - 1) // 2

    def offsets(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1) * self.spacing


@dataclass(frozen=True)
class ZetaSample:
    tau: float
    theta: float
    max_log_abs: float
    argmax_offset: float
    n_points: int
    seed_index: int


def grid_spacing(T: float) -> float:
    """Mean gap between zeros at height T, 2 pi / log(T / 2 pi)."""
    return _TWO_PI / math.log(T / _TWO_PI)


def half_width(T: float, theta: float) -> float:
    return math.pi * math.log(T) ** theta


def grid_spec(tau: float, T: float, theta: float) -> GridSpec:
    """Symmetric grid tau + j*spacing, |j| <= floor(half_width / spacing)."""
    hw = half_width(T, theta)
    spacing = grid_spacing(T)
    k = math.floor(hw / spacing)
    return GridSpec(t_center=float(tau), half_width=hw, spacing=spacing, n_points=2 * k + 1)


def _theta_mod_2pi(tau: float) -> float:
    with mpmath.workdps(40):
        t = mpmath.mpf(tau)
        th = (
            t / 2 * (mpmath.log(t / (2 * mpmath.pi)) - 1)
            - mpmath.pi / 8
            + 1 / (48 * t)
            + mpmath.mpf(7) / (5760 * t**3)
        )
        return float(mpmath.fmod(th, 2 * mpmath.pi))


def _theta_curvature(tau: float, h: np.ndarray) -> np.ndarray:
    # theta(tau + h) - theta(tau) - theta'(tau) h
    u = h / tau
    main = 0.5 * tau * ((1.0 + u) * np.log1p(u) - u)
    t = tau + h

    def corr(x):
        return 1.0 / (48.0 * x) + 7.0 / (5760.0 * x**3)

    corr_slope = -1.0 / (48.0 * tau * tau) - 7.0 / (1920.0 * tau**4)
    return main + (corr(t) - corr(tau) - corr_slope * h)


def _remainder(t: np.ndarray) -> np.ndarray:
    a = np.sqrt(t / _TWO_PI)
    n = np.floor(a)
    x = (a - n) - 0.5
    inv = 1.0 / a
    series = _POLY.polyval(x, _C0) + inv * (_POLY.polyval(x, _C1) + inv * _POLY.polyval(x, _C2))
    sign = np.where(n % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
    return sign * series / np.sqrt(a)


def z_on_grid(center: float, spacing: float, k_max: int, backend: str | None = None):
    """Z(center + j*spacing) for j = -k_max..k_max.

    Returns (offsets, values).  The whole grid must lie in t >= 1e5.
    """
    center = float(center)
    k_max = int(k_max)
    offsets = np.arange(-k_max, k_max + 1) * spacing
    t = center + offsets
    if not t[0] >= T_MIN:
        raise ValueError(f"Riemann-Siegel evaluation requires t >= {T_MIN:g}, got {t[0]!r}")
    counts = np.floor(np.sqrt(t / _TWO_PI)).astype(np.intp)
    n_max = int(counts.max())
    log_hi, _ = LOG_TABLE.get(n_max)
    alpha = np.mod(_theta_mod_2pi(center) - t_log_n_mod_2pi(center, n_max), _TWO_PI)
    beta = riemann_siegel_theta_prime(center) - log_hi
    amp = 1.0 / np.sqrt(np.arange(1, n_max + 1, dtype=float))
    nu = _theta_curvature(center, offsets)
    kern = _backend.get(backend)
    main = kern.rs_main_sum(alpha, beta, amp, counts, -k_max, float(spacing), nu)
    return offsets, main + _remainder(t)


def riemann_siegel_Z(t: float, backend: str | None = None) -> float:
    """Hardy's Z(t), with |Z(t)| = |zeta(1/2 + it)|, for t >= 1e5."""
    return float(z_on_grid(t, 1.0, 0, backend)[1][0])


def _log_abs(z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(np.abs(z)), LOG_ABS_FLOOR)


def interval_maxima(
    tau: float, T: float, thetas, seed_index: int = 0, backend: str | None = None
) -> list[ZetaSample]:
    """Grid maxima of log|Z| around tau for several theta from one evaluation.

    The grids for different theta are nested (same centre and spacing), so
    Z is evaluated once on the widest.
    """
    thetas = [float(th) for th in thetas]
    for th in thetas:
        if not 0.0 <= th <= 3.0:
            raise ValueError(f"theta must lie in [0, 3], got {th!r}")
    specs = [grid_spec(tau, T, th) for th in thetas]
    k_top = max(s.k_max for s in specs)
    spacing = specs[0].spacing
    offsets, z = z_on_grid(tau, spacing, k_top, backend)
    log_abs = _log_abs(z)
    out = []
    for th, spec in zip(thetas, specs):
        lo = k_top - spec.k_max
        window = log_abs[lo : lo + spec.n_points]
        j = int(np.argmax(window))
        out.append(
            ZetaSample(
                tau=float(tau),
                theta=th,
                max_log_abs=float(window[j]),
                argmax_offset=float(offsets[lo + j]),
                n_points=spec.n_points,
                seed_index=int(seed_index),
            )
        )
    return out


def interval_max(tau: float, T: float, theta: float, seed_index: int = 0) -> ZetaSample:
    """Maximum of log|zeta(1/2 + i(tau + h))| over the grid |h| <= pi (log T)^theta."""
    return interval_maxima(tau, T, [theta], seed_index)[0]


def riemann_von_mangoldt(t: float) -> float:
    """Smooth zero-counting function (t / 2 pi) log(t / 2 pi e) + 7/8."""
    return t / _TWO_PI * math.log(t / (_TWO_PI * math.e)) + 0.875


def count_sign_changes(t_start: float, t_end: float, step: float = 0.05) -> int:
    """Number of sign changes of Z on a grid of the given step over [t_start, t_end]."""
    k = math.ceil((t_end - t_start) / (2.0 * step))
    _, z = z_on_grid(0.5 * (t_start + t_end), step, k)
    s = np.sign(z)
    return int(np.count_nonzero(s[1:] * s[:-1] < 0))


def zeta_euler_maclaurin(t: float, n_terms: int | None = None, corrections: int = 30) -> complex:
    """zeta(1/2 + it) by Euler-Maclaurin summation (independent of Riemann-Siegel).

    The direct sum over n < N uses extended-precision phases; the
    boundary and Bernoulli terms are evaluated with mpmath.  The default
    N ~ t/3 makes the correction series converge geometrically.
    """
    t = float(t)
    n = int(n_terms) if n_terms is not None else max(30, int(t / 3.0) + 10)
    tl = np.longdouble(t)
    two_pi = np.longdouble(2) * np.longdouble(np.pi)
    acc = 0j
    for lo in range(1, n, 1 << 20):
        k = np.arange(lo, min(n, lo + (1 << 20)), dtype=np.longdouble)
        phase = np.fmod(tl * np.log(k), two_pi).astype(float)
        w = 1.0 / np.sqrt(k.astype(float))
        acc += complex(np.sum(w * np.cos(phase)), -np.sum(w * np.sin(phase)))
    with mpmath.workdps(30):
        s = mpmath.mpc(0.5, t)
        big = mpmath.mpf(n)
        n_pow = big ** (-s)
        tail = big ** (1 - s) / (s - 1) + n_pow / 2
        rising = s
        power = n_pow / big
        for k in range(1, corrections + 1):
            tail += mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * rising * power
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            power /= big * big
        return acc + complex(tail)
