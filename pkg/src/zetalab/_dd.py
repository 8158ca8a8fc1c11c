"""Double-double helpers for reducing large phases t*log(n) modulo 2 pi."""

from __future__ import annotations

import threading

import mpmath
import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1

with mpmath.workdps(40):
    _TWO_PI = mpmath.mpf(2) * mpmath.pi
    TWO_PI_HI = float(_TWO_PI)
    TWO_PI_LO = float(_TWO_PI - TWO_PI_HI)


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """p + e == a * b exactly (Dekker), for |a*b| well inside the double range."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def reduce_2pi(hi, lo):
    """(hi + lo) mod 2 pi in [0, 2 pi), hi and lo arrays or scalars."""
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    k = np.rint(hi / TWO_PI_HI)
    q, qe = two_prod(k, TWO_PI_HI)
    r = ((hi - q) - qe) + (lo - k * TWO_PI_LO)
    return np.mod(r, TWO_PI_HI)


class _LogTable:
    """log(n) for n = 1..size as an unevaluated sum hi + lo, grown on demand."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.hi = np.zeros(0)
        self.lo = np.zeros(0)

    def get(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        if size > self.hi.size:
            with self._lock:
                if size > self.hi.size:
                    self._grow(max(size, 2 * self.hi.size, 1024))
        return self.hi[:size], self.lo[:size]

    def _grow(self, size: int) -> None:
        start = self.hi.size + 1
        hi = np.empty(size - start + 1)
        lo = np.empty_like(hi)
        with mpmath.workdps(40):
            for i, n in enumerate(range(start, size + 1)):
                v = mpmath.log(n)
                h = float(v)
                hi[i] = h
                lo[i] = float(v - h)
        self.hi = np.concatenate([self.hi, hi])
        self.lo = np.concatenate([self.lo, lo])


LOG_TABLE = _LogTable()


def t_log_n_mod_2pi(t: float, size: int) -> np.ndarray:
    """t * log(n) mod 2 pi for n = 1..size, exact to a few ulps of 2 pi."""
    hi, lo = LOG_TABLE.get(size)
    p, e = two_prod(float(t), hi)
    return reduce_2pi(p, e + float(t) * lo)
