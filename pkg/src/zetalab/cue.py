"""CUE characteristic polynomials: exact MGF, cumulants, density expansion, sampling.

For U Haar-distributed on U(N) and X = log|det(I - U)|,

    E[e^{sX}] = M_N(s) = prod_{j=1}^N Gamma(j) Gamma(j+s) / Gamma(j+s/2)^2.

X has the same law as sum_j log|1 - gamma_j| with independent
gamma_j = r_j e^{i phi_j}, phi_j uniform and r_j^2 ~ Beta(1, j-1), which
gives an O(N) sampler.  Draws are generated in chunks of ``CHUNK`` from
Philox streams keyed by (seed, chunk), so any subset of draws can be
reproduced independently of how the work was split.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from . import _backend
from .moments import rmt_factor
from .rng import STREAM_CUE, keyed_generator
from .special import EULER_GAMMA, gaussian_upper_tail

__all__ = [
    "CHUNK",
    "CueDraw",
    "CueModel",
    "CumulantTable",
    "TailResult",
    "TooFewExceedancesError",
    "a_coefficients",
    "cumulants",
    "density_expansion",
    "empirical_mgf",
    "exact_cumulants",
    "mgf",
    "parity_sum",
    "sample_log_abs_poly",
    "sample_values",
    "tail_experiment",
    "zeta_integer",
]

CHUNK = 8192
M_MAX_DEFAULT = 8
_ZETA_TERMS = 10**6


class TooFewExceedancesError(ArithmeticError):
    """Fewer than 100 draws exceeded the threshold; k is too large for n and samples."""


@dataclass(frozen=True)
class CueModel:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix dimension must be >= 1")


@dataclass(frozen=True)
class CumulantTable:
    """Q_1..Q_{m_max}; ``q[m - 1]`` is Q_m."""

    n: int
    q: tuple[float, ...]
    m_max: int

    def __getitem__(self, m: int) -> float:
        if not 1 <= m <= self.m_max:
            raise IndexError(f"cumulant order {m} outside 1..{self.m_max}")
        return self.q[m - 1]


@dataclass(frozen=True)
class CueDraw:
    n: int
    value: float
    seed_index: int


@dataclass(frozen=True)
class TailResult:
    n: int
    k: float
    samples: int
    V: float
    exceedances: int
    p_hat: float
    gaussian_tail: float
    ratio: float
    std_error: float
    f_k_target: float


def mgf(n: int, s: float) -> float:
    """M_N(s), summed in log space."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not s > -1.0:
        raise ValueError(f"mgf requires s > -1, got {s!r}")
    if s == 0.0:
        return 1.0
    j = np.arange(1, n + 1, dtype=float)
    terms = _sp.gammaln(j) + _sp.gammaln(j + s) - 2.0 * _sp.gammaln(j + 0.5 * s)
    return math.exp(math.fsum(terms))


def zeta_integer(s: int, terms: int = _ZETA_TERMS) -> float:
    """zeta(s) for integer s >= 2: direct sum plus Euler-Maclaurin tail."""
    if s < 2:
        raise ValueError("zeta_integer needs s >= 2")
    m = float(terms)
    head = np.arange(1, terms, dtype=float) ** (-float(s))
    tail = m ** (1 - s) / (s - 1) + 0.5 * m ** (-s) + s / 12.0 * m ** (-s - 1)
    return math.fsum(head[::-1]) + tail


def cumulants(n: int, m_max: int = M_MAX_DEFAULT) -> CumulantTable:
    """Large-N expansions of the cumulants Q_1..Q_{m_max} of log|P_N|."""
    if not 3 <= m_max <= 12:
        raise ValueError(f"m_max must lie in [3, 12], got {m_max!r}")
    if n < 2:
        raise ValueError("cumulant expansions need n >= 2")
    q = [0.0, 0.5 * math.log(n) + 0.5 * (EULER_GAMMA + 1.0) + 1.0 / (24.0 * n**2) - 1.0 / (80.0 * n**4)]
    for m in range(3, m_max + 1):
        half = 2.0 ** (m - 1)
        q.append(
            (-1) ** m
            * (half - 1.0)
            / half
            * (math.gamma(m) * zeta_integer(m - 1) - math.factorial(m - 3) / float(n) ** (m - 2))
        )
    return CumulantTable(n=n, q=tuple(q), m_max=m_max)


def exact_cumulants(n: int, m_max: int = M_MAX_DEFAULT) -> CumulantTable:
    """Exact Q_m = (1 - 2^{1-m}) sum_{j<=N} psi^{(m-1)}(j) for m >= 2."""
    if n < 1 or m_max < 2:
        raise ValueError("need n >= 1 and m_max >= 2")
    j = np.arange(1, n + 1, dtype=float)
    q = [0.0]
    for m in range(2, m_max + 1):
        q.append((1.0 - 2.0 ** (1 - m)) * math.fsum(_sp.polygamma(m - 1, j)))
    return CumulantTable(n=n, q=tuple(q), m_max=m_max)


def a_coefficients(table: CumulantTable) -> list[float]:
    """A_3..A_{m_max}: Taylor coefficients of exp(sum_{m>=3} Q_m s^m / m!)."""
    if table.m_max < 3:
        raise ValueError("m_max must be >= 3")
    size = table.m_max + 1
    a = [0.0] * size
    for m in range(3, size):
        a[m] = table[m] / math.factorial(m)
    # b = exp(a): n b_n = sum_k k a_k b_{n-k}
    b = [1.0] + [0.0] * (size - 1)
    for m in range(1, size):
        b[m] = math.fsum(k * a[k] * b[m - k] for k in range(1, m + 1)) / m
    return b[3:]


def _double_factorial(k: int) -> int:
    return 1 if k <= 0 else math.prod(range(k, 0, -2))


def parity_sum(m: int, p: int) -> int:
    """E(m, p): real value of i^{m-p} (m-p-1)!!, zero for odd m - p."""
    d = m - p
    if d % 2:
        return 0
    return (-1) ** (d // 2) * _double_factorial(d - 1)


def density_expansion(x, table: CumulantTable):
    """Truncated density of log|P_N| / sqrt(Q_2) around the Gaussian."""
    x = np.asarray(x, dtype=float)
    coeffs = a_coefficients(table)
    q2 = table[2]
    bracket = np.ones_like(x)
    for m, a_m in enumerate(coeffs, start=3):
        poly = np.zeros_like(x)
        for p in range(m + 1):
            e = parity_sum(m, p)
            if e:
                poly = poly + math.comb(m, p) * e * x**p
        bracket = bracket + a_m / q2 ** (m / 2) * poly
    out = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi) * bracket
    return float(out) if out.ndim == 0 else out


# --- sampling ---------------------------------------------------------------


def _stride(n: int) -> int:
    # row width padded to whole Philox blocks of four doubles
    return 4 * ((2 * n + 3) // 4)


def _rows_to_values(rows: np.ndarray, n: int, backend: str | None) -> np.ndarray:
    u_phase = np.ascontiguousarray(rows[:, :n])
    u_radius = np.ascontiguousarray(1.0 - rows[:, n : 2 * n])  # in (0, 1]
    return _backend.get(backend).cue_log_abs_sum(u_phase, u_radius)


def _chunk_values(n: int, seed: int, chunk: int, backend: str | None = None) -> np.ndarray:
    gen = keyed_generator(seed, chunk, STREAM_CUE)
    rows = gen.random((CHUNK, _stride(n)))
    return _rows_to_values(rows, n, backend)


def sample_log_abs_poly(n: int, seed_index: int, seed: int = 0, backend: str | None = None) -> CueDraw:
    """Draw number ``seed_index`` of log|P_N| for run ``seed``."""
    CueModel(n)
    if seed_index < 0:
        raise ValueError("seed_index must be >= 0")
    chunk, row = divmod(int(seed_index), CHUNK)
    gen = keyed_generator(seed, chunk, STREAM_CUE)
    stride = _stride(n)
    gen.bit_generator.advance(row * stride // 4)
    value = _rows_to_values(gen.random((1, stride)), n, backend)[0]
    return CueDraw(n=n, value=float(value), seed_index=int(seed_index))


def _chunk_slice(n, seed, chunk, lo, hi, backend):
    vals = _chunk_values(n, seed, chunk, backend)
    return vals[lo - chunk * CHUNK : hi - chunk * CHUNK]


def _chunks(start: int, stop: int):
    for c in range(start // CHUNK, (stop + CHUNK - 1) // CHUNK):
        yield c, max(start, c * CHUNK), min(stop, (c + 1) * CHUNK)


def _pool(workers: int):
    ctx = multiprocessing.get_context("fork" if os.name == "posix" else "spawn")
    return ProcessPoolExecutor(max_workers=workers, mp_context=ctx)


def _workers(workers: int | None) -> int:
    if workers is None:
        from .experiment import default_workers

        return default_workers()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return int(workers)


def sample_values(
    n: int,
    count: int,
    seed: int,
    start: int = 0,
    workers: int | None = None,
    backend: str | None = None,
) -> np.ndarray:
    """Draws start..start+count-1 of log|P_N|, identical for any worker count."""
    CueModel(n)
    if count < 0 or start < 0:
        raise ValueError("count and start must be >= 0")
    workers = _workers(workers)
    parts = list(_chunks(start, start + count))
    if workers == 1 or len(parts) <= 1:
        out = [_chunk_slice(n, seed, c, lo, hi, backend) for c, lo, hi in parts]
    else:
        with _pool(workers) as pool:
            futs = [pool.submit(_chunk_slice, n, seed, c, lo, hi, backend) for c, lo, hi in parts]
            out = [f.result() for f in futs]
    return np.concatenate(out) if out else np.empty(0)


def _chunk_exceedances(n, seed, chunk, lo, hi, threshold, backend):
    return int(np.count_nonzero(_chunk_slice(n, seed, chunk, lo, hi, backend) > threshold))


def tail_experiment(
    n: int,
    k: float,
    samples: int,
    seed: int,
    workers: int | None = None,
    backend: str | None = None,
    point: str = "cumulant",
) -> TailResult:
    """Monte Carlo P(log|P_N| > sqrt(Q_2) V) / Q(V).

    ``point="cumulant"`` evaluates at V = k log N / sqrt(Q_2), the threshold
    being exactly k log N.  Because Q_2 carries the constant (gamma + 1)/2,
    this ratio tends to f_k exp(-k^2 (gamma + 1)) rather than f_k.
    ``point="theorem"`` uses V = k sqrt(2 log N) with the same threshold,
    where the ratio tends to f_k = G(1+k)^2 / G(1+2k).
    """
    if point not in ("cumulant", "theorem"):
        raise ValueError(f"unknown evaluation point {point!r}")
    if not 0.0 < k <= 1.5:
        raise ValueError(f"k must lie in (0, 1.5], got {k!r}")
    if samples < 10**5:
        raise ValueError("samples must be >= 1e5")
    q2 = cumulants(n, 3)[2]
    threshold = k * math.log(n)
    V = threshold / math.sqrt(q2) if point == "cumulant" else k * math.sqrt(2.0 * math.log(n))
    workers = _workers(workers)
    parts = list(_chunks(0, samples))
    if workers == 1 or len(parts) <= 1:
        hits = sum(_chunk_exceedances(n, seed, c, lo, hi, threshold, backend) for c, lo, hi in parts)
    else:
        with _pool(workers) as pool:
            futs = [
                pool.submit(_chunk_exceedances, n, seed, c, lo, hi, threshold, backend)
                for c, lo, hi in parts
            ]
            hits = sum(f.result() for f in futs)
    if hits < 100:
        raise TooFewExceedancesError(
            f"only {hits} of {samples} draws exceed the threshold (n={n}, k={k})"
        )
    p_hat = hits / samples
    gauss = gaussian_upper_tail(V)
    return TailResult(
        n=n,
        k=float(k),
        samples=samples,
        V=V,
        exceedances=hits,
        p_hat=p_hat,
        gaussian_tail=gauss,
        ratio=p_hat / gauss,
        std_error=math.sqrt(p_hat * (1.0 - p_hat) / samples) / gauss,
        f_k_target=rmt_factor(k),
    )


def empirical_mgf(values: Sequence[float] | np.ndarray, s: float) -> tuple[float, float]:
    """Sample mean of e^{sX} and its standard error."""
    w = np.exp(s * np.asarray(values, dtype=float))
    return float(w.mean()), float(w.std(ddof=1) / math.sqrt(w.size))
