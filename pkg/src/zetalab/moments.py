"""Leading coefficients C_k = a_k * f_k of the conjectured 2k-th moments of zeta.

a_k is an Euler product over primes, f_k = G(1+k)^2 / G(1+2k) the
random-matrix factor.  The Euler product is accumulated in log-space over
a sieved prime table and closed with an analytic estimate of the factors
beyond the sieve bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special as _sp

from .special import log_barnes_g

__all__ = [
    "K_MAX",
    "MomentCoefficient",
    "PrimeTable",
    "TailToleranceError",
    "arithmetic_factor",
    "euler_factor_log_coefficients",
    "moment_coefficient",
    "rmt_factor",
    "sieve_primes",
]

# k = sqrt(1 + theta) <= 2 in the experiment; the table of integer moments
# needs k = 3 and k = 4 as well.
K_MAX = 4.0
_SIEVE_MAX = 10**8
_SERIES_CUTOFF = 1e-17


class TailToleranceError(ArithmeticError):
    """The prime sieve bound is too small for the requested accuracy."""


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class MomentCoefficient:
    k: float
    a_k: float
    f_k: float
    c_k: float


def sieve_primes(limit: int) -> PrimeTable:
    """All primes <= limit by the sieve of Eratosthenes."""
    limit = int(limit)
    if not 2 <= limit <= _SIEVE_MAX:
        raise ValueError(f"sieve limit must lie in [2, {_SIEVE_MAX}], got {limit}")
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    primes = np.flatnonzero(is_prime).astype(np.int64)
    primes.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes)


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> PrimeTable:
    return sieve_primes(limit)


def _check_k(k: float) -> None:
    if not 0.0 < k <= K_MAX:
        raise ValueError(f"k must lie in (0, {K_MAX}], got {k!r}")


def euler_factor_log_coefficients(k: float, order: int = 3) -> list[float]:
    """Taylor coefficients in x = 1/p of log[(1-x)^{k^2} sum_m ((k)_m/m!)^2 x^m].

    Returns [c_1, ..., c_order]; c_1 = 0 and c_2 = -k^2 (k-1)^2 / 4.
    """
    a = [1.0]
    for m in range(order):
        a.append(a[-1] * ((k + m) / (m + 1)) ** 2)
    # log of the power series 1 + a_1 x + ... via l_n = a_n - (1/n) sum j l_j a_{n-j}
    logs = [0.0] * (order + 1)
    for n in range(1, order + 1):
        logs[n] = a[n] - sum(j * logs[j] * a[n - j] for j in range(1, n)) / n
    return [logs[n] - k * k / n for n in range(1, order + 1)]


def _prime_power_sum_tail(limit: float, power: int) -> float:
    # sum_{p > limit} p^{-power} ~ int_limit^inf x^{-power} / log x dx
    #                           = E1((power - 1) log limit)
    return float(_sp.exp1((power - 1) * math.log(limit)))


def arithmetic_factor(
    k: float, primes: PrimeTable, tail_tol: float = 1e-6, *, return_log: bool = False
) -> float:
    """The arithmetic factor a_k of the moment conjecture.

    Each Euler factor is summed in log-space with the term recursion
    term_{m+1} = term_m ((k+m)/(m+1))^2 / p until the next term drops below
    1e-17 of the partial sum.  Primes beyond ``primes.limit`` contribute
    -(k^2 (k-1)^2 / 4) sum_{p > limit} p^{-2}; the sum is replaced by
    E1(log limit).  ``tail_tol`` bounds the error left after that estimate
    (next order in 1/p plus a 1% uncertainty in the prime sum), and
    :class:`TailToleranceError` is raised when the bound is exceeded.
    """
    _check_k(k)
    if not 0.0 < tail_tol <= 1e-6:
        raise ValueError(f"tail_tol must lie in (0, 1e-6], got {tail_tol!r}")
    p = primes.primes.astype(np.float64)
    inv_p = 1.0 / p
    term = np.ones_like(p)
    excess = np.zeros_like(p)  # partial sum minus the m = 0 term
    active = np.arange(p.size)
    m = 0
    while active.size:
        term[active] *= ((k + m) / (m + 1)) ** 2 * inv_p[active]
        excess[active] += term[active]
        keep = term[active] >= _SERIES_CUTOFF * (1.0 + excess[active])
        active = active[keep]
        m += 1
    log_factors = k * k * np.log1p(-inv_p) + np.log1p(excess)
    c2, c3 = euler_factor_log_coefficients(k, order=3)[1:]
    tail = c2 * _prime_power_sum_tail(primes.limit, 2)
    residual = abs(c3) * _prime_power_sum_tail(primes.limit, 3) + 0.01 * abs(tail)
    if residual > tail_tol:
        raise TailToleranceError(
            f"prime tail error estimate {residual:.3e} exceeds {tail_tol:.1e} "
            f"at k={k}, limit={primes.limit}"
        )
    log_a = math.fsum(np.sort(log_factors)) + tail
    return log_a if return_log else math.exp(log_a)


def rmt_factor(k: float) -> float:
    """f_k = G(1+k)^2 / G(1+2k)."""
    if not k > 0:
        raise ValueError(f"k must be positive, got {k!r}")
    return math.exp(2.0 * log_barnes_g(1.0 + k) - log_barnes_g(1.0 + 2.0 * k))


def moment_coefficient(
    k: float, primes: PrimeTable | int = 10**6, tail_tol: float = 1e-6
) -> MomentCoefficient:
    """Assemble C_k = a_k f_k.  ``primes`` may be a table or a sieve bound."""
    if not isinstance(primes, PrimeTable):
        primes = _cached_primes(int(primes))
    a_k = arithmetic_factor(k, primes, tail_tol)
    f_k = rmt_factor(k)
    return MomentCoefficient(k=float(k), a_k=a_k, f_k=f_k, c_k=a_k * f_k)
