"""Finite-size prediction for the maximum of log|zeta| over a short interval.

For a height T and interval exponent theta the maximum over
|h| <= pi (log T)^theta is modelled as N independent values with a
C-corrected Gaussian tail.  The deterministic level is sigma * Y* where
N C Q(Y*) = 1, and the fluctuation Y around it has distribution function
exp(-G(y)), G(y) = Q(Y* + y/sigma) / Q(Y*).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy import special as _sp

from .moments import moment_coefficient
from .special import log_gaussian_upper_tail

__all__ = [
    "MEISSEL_MERTENS",
    "NoRootError",
    "Prediction",
    "PredictionInput",
    "QuadratureError",
    "fluctuation_cdf",
    "fluctuation_mean",
    "fluctuation_sf",
    "gumbel_limit_mean",
    "predict",
    "sigma_T",
    "solve_y_star",
    "y_star_expansion",
    "zero_count",
]

MEISSEL_MERTENS = 0.2614972128476428
_LOG_2PI_E = math.log(2.0 * math.pi) + 1.0
_Y_BRACKET = (0.0, 50.0)


class NoRootError(ValueError):
    """N * C <= 2: the level equation has no positive root."""


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PredictionInput:
    T: float
    theta: float
    use_correction: bool = True
    prime_limit: int = 10**6

    def __post_init__(self) -> None:
        if not self.T >= 1e4:
            raise ValueError(f"T must be >= 1e4, got {self.T!r}")
        if not 0.0 <= self.theta <= 3.0:
            raise ValueError(f"theta must lie in [0, 3], got {self.theta!r}")


@dataclass(frozen=True)
class Prediction:
    T: float
    theta: float
    n_points: float
    sigma: float
    y_star: float
    shift: float
    beta: float
    m_const: float
    fluct_mean: float
    fluct_std: float
    predicted_mean: float
    predicted_std: float
    c_used: float
    model_expected: bool


def zero_count(T: float, theta: float) -> float:
    """Expected number of zeros in a window of length 2 pi (log T)^theta."""
    L = math.log(T)
    return L**theta * (L - _LOG_2PI_E)


def sigma_T(T: float) -> float:
    """Standard deviation of log|zeta| at height T, Mertens-corrected."""
    ll = math.log(math.log(T))
    return math.sqrt(0.5 * ll) + MEISSEL_MERTENS / (2.0 * math.sqrt(2.0 * ll))


def _log_tail_slope(y: float) -> float:
    # d/dy log Q(y) = -phi(y) / Q(y)
    log_phi = -0.5 * y * y - 0.5 * math.log(2.0 * math.pi)
    return -math.exp(log_phi - log_gaussian_upper_tail(y))


def solve_y_star(n_points: float, c: float, tol: float = 1e-12) -> float:
    """Root Y* > 0 of n_points * c * Q(Y*) = 1, solved on log Q."""
    nc = n_points * c
    if not nc > 2.0:
        raise NoRootError(f"N*C = {nc!r} <= 2; no positive level exists")
    if not tol <= 1e-12:
        raise ValueError("tol must be <= 1e-12")
    log_nc = math.log(n_points) + math.log(c)

    def f(y: float) -> float:
        return log_nc + log_gaussian_upper_tail(y)

    y = optimize.brentq(f, *_Y_BRACKET, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    # Newton polish; the bracket keeps it honest
    for _ in range(3):
        r = f(y)
        if abs(math.expm1(r)) <= tol / 4:
            break
        y_new = y - r / _log_tail_slope(y)
        if not _Y_BRACKET[0] < y_new < _Y_BRACKET[1]:
            break
        y = y_new
    residual = abs(math.expm1(f(y)))
    if residual > tol:
        raise ArithmeticError(f"Y* residual {residual:.2e} exceeds {tol:.1e}")
    return y


def y_star_expansion(n_points: float, c: float = 1.0) -> float:
    """Two-term asymptotic approximation to Y* (for comparison only)."""
    r = math.sqrt(2.0 * math.log(n_points))
    return r - (math.log(math.log(n_points)) + math.log(4 * math.pi) - 2 * math.log(c)) / (2 * r)


def _log_G(y, y_star: float, sigma: float):
    return _sp.log_ndtr(-(y_star + np.asarray(y, dtype=float) / sigma)) - _sp.log_ndtr(-y_star)


def fluctuation_cdf(y, y_star: float, sigma: float):
    """P(max - sigma*Y* <= y) = exp(-G(y)); zero below y = -sigma*Y*."""
    y_arr = np.asarray(y, dtype=float)
    out = np.exp(-np.exp(_log_G(y_arr, y_star, sigma)))
    out = np.where(y_arr < -sigma * y_star, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def fluctuation_sf(y, y_star: float, sigma: float):
    """1 - exp(-G(y)), the exceedance probability of the recentred maximum."""
    y_arr = np.asarray(y, dtype=float)
    out = -np.expm1(-np.exp(_log_G(y_arr, y_star, sigma)))
    out = np.where(y_arr < -sigma * y_star, 1.0, out)
    return float(out) if np.ndim(out) == 0 else out


def _mean_from_cdf(cdf: Callable[[float], float], lower: float, atol: float) -> float:
    """E[Y] = int_0^inf (1 - F) - int_lower^0 F for a distribution supported on [lower, inf)."""
    upper, err_u = integrate.quad(lambda y: 1.0 - cdf(y), 0.0, np.inf, epsabs=atol / 4, epsrel=1e-12, limit=200)
    lower_part, err_l = integrate.quad(cdf, lower, 0.0, epsabs=atol / 4, epsrel=1e-12, limit=200)
    if err_u + err_l > atol:
        raise QuadratureError(f"quadrature error {err_u + err_l:.2e} exceeds {atol:.1e}")
    return upper - lower_part


def fluctuation_mean(y_star: float, sigma: float, atol: float = 1e-8) -> float:
    """Mean of the recentred maximum under the finite-size law exp(-G(y))."""

    def one_minus_cdf(y: float) -> float:
        return float(-np.expm1(-np.exp(_log_G(y, y_star, sigma))))

    upper, err_u = integrate.quad(one_minus_cdf, 0.0, np.inf, epsabs=atol / 4, epsrel=1e-12, limit=200)
    lower_part, err_l = integrate.quad(
        lambda y: fluctuation_cdf(y, y_star, sigma), -sigma * y_star, 0.0,
        epsabs=atol / 4, epsrel=1e-12, limit=200,
    )
    if err_u + err_l > atol:
        raise QuadratureError(f"quadrature error {err_u + err_l:.2e} exceeds {atol:.1e}")
    return upper - lower_part


def gumbel_limit_mean(beta: float, atol: float = 1e-8) -> float:
    """Mean of the pure Gumbel law exp(-e^{-y/beta}) by the same quadrature."""
    # below -40 beta the distribution function is exp(-e^40) == 0 in doubles
    return _mean_from_cdf(lambda y: math.exp(-math.exp(-y / beta)), -40.0 * beta, atol)


def predict(inp: PredictionInput) -> Prediction:
    """Predicted mean and standard deviation of the interval maximum."""
    T, theta = float(inp.T), float(inp.theta)
    k = math.sqrt(1.0 + theta)
    c = moment_coefficient(k, inp.prime_limit).c_k if inp.use_correction else 1.0
    n = zero_count(T, theta)
    sigma = sigma_T(T)
    y_star = solve_y_star(n, c)
    shift = sigma * y_star
    beta = sigma * sigma / shift
    f_mean = fluctuation_mean(y_star, sigma)
    f_std = beta * math.pi / math.sqrt(6.0)
    return Prediction(
        T=T,
        theta=theta,
        n_points=n,
        sigma=sigma,
        y_star=y_star,
        shift=shift,
        beta=beta,
        m_const=MEISSEL_MERTENS / 4.0,
        fluct_mean=f_mean,
        fluct_std=f_std,
        predicted_mean=shift + f_mean,
        predicted_std=f_std,
        c_used=c,
        model_expected=theta > 0.0,
    )
