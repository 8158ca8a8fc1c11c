from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
import sympy

from zetalab.moments import (
    PrimeTable,
    TailToleranceError,
    arithmetic_factor,
    euler_factor_log_coefficients,
    moment_coefficient,
    rmt_factor,
    sieve_primes,
)


def trial_division_primes(limit):
    return [n for n in range(2, limit + 1) if all(n % d for d in range(2, math.isqrt(n) + 1))]


@pytest.mark.parametrize("limit", [2, 3, 10, 97, 100, 1000, 7919])
def test_sieve_matches_trial_division(limit):
    assert sieve_primes(limit).primes.tolist() == trial_division_primes(limit)


def test_sieve_counts():
    assert len(sieve_primes(10**6)) == 78498
    with pytest.raises(ValueError):
        sieve_primes(1)


def test_sieve_table_immutable():
    table = sieve_primes(100)
    with pytest.raises(ValueError):
        table.primes[0] = 4


def test_euler_factor_coefficients_against_sympy():
    x, k = sympy.symbols("x k")
    for kv in [sympy.Rational(1, 2), 1, sympy.Rational(3, 2), 2, sympy.sqrt(3)]:
        series = sum(
            (sympy.rf(kv, m) / sympy.factorial(m)) ** 2 * x**m for m in range(6)
        )
        expr = sympy.series(kv**2 * sympy.log(1 - x) + sympy.log(series), x, 0, 4).removeO()
        got = euler_factor_log_coefficients(float(kv), order=3)
        for n in (1, 2, 3):
            assert got[n - 1] == pytest.approx(float(expr.coeff(x, n)), abs=1e-14)


def test_c2_closed_form():
    for k in [0.5, 1.0, 1.5, 2.0, 2.5]:
        assert euler_factor_log_coefficients(k)[1] == pytest.approx(-(k**2) * (k - 1) ** 2 / 4, abs=1e-14)


def test_a1_is_one():
    assert arithmetic_factor(1.0, sieve_primes(10**4)) == 1.0


def test_a2_closed_form():
    # a_2 = prod (1 - 1/p)^4 (1 + 4/p + 1/p^2) ... = 6 / pi^2
    assert moment_coefficient(2.0).a_k == pytest.approx(6 / math.pi**2, rel=1e-9)


def test_a_k_direct_product_oracle():
    # independent evaluation of each Euler factor with mpmath hypergeometric 2F1
    primes = sieve_primes(2000)
    k = 1.5
    with mpmath.workdps(30):
        total = mpmath.mpf(0)
        for p in primes.primes.tolist():
            x = mpmath.mpf(1) / p
            total += k**2 * mpmath.log(1 - x) + mpmath.log(mpmath.hyp2f1(k, k, 1, x))
    c2 = -(k**2) * (k - 1) ** 2 / 4
    from scipy.special import exp1

    expected = float(total) + c2 * exp1(math.log(2000))
    got = arithmetic_factor(k, primes, tail_tol=1e-6, return_log=True)
    assert got == pytest.approx(expected, abs=1e-9)


def test_limit_convergence():
    for k in [1.5, 2.0, 3.0]:
        lo = arithmetic_factor(k, sieve_primes(10**5), 1e-6)
        hi = arithmetic_factor(k, sieve_primes(10**6), 1e-6)
        assert abs(math.log(lo / hi)) < 1e-6
        if k <= 2.0:
            assert abs(lo / hi - 1) < 1e-8


def test_tail_tolerance_error():
    with pytest.raises(TailToleranceError):
        arithmetic_factor(4.0, sieve_primes(1000), 1e-6)
    with pytest.raises(ValueError):
        arithmetic_factor(2.0, sieve_primes(1000), 1e-3)


def test_rmt_factor_values():
    assert rmt_factor(1.0) == pytest.approx(1.0, abs=1e-14)
    assert rmt_factor(2.0) == pytest.approx(1 / 12, rel=1e-12)
    assert rmt_factor(3.0) == pytest.approx(1 / 8640, rel=1e-12)
    with mpmath.workdps(30):
        ref = mpmath.barnesg(1.5) ** 2 / mpmath.barnesg(2)
    assert rmt_factor(0.5) == pytest.approx(float(ref), rel=1e-12)


def test_moment_coefficient_table():
    c1 = moment_coefficient(1.0)
    assert abs(c1.c_k - 1) <= 1e-9
    assert moment_coefficient(2.0).c_k == pytest.approx(1 / (2 * math.pi**2), rel=1e-8)
    assert moment_coefficient(3.0).c_k == pytest.approx(5.708e-6, rel=1e-3)
    assert moment_coefficient(4.0).c_k == pytest.approx(2.465e-13, rel=1e-3)


def test_moment_coefficient_accepts_table():
    table = sieve_primes(10**5)
    assert isinstance(table, PrimeTable)
    assert moment_coefficient(2.0, table).c_k == pytest.approx(1 / (2 * math.pi**2), rel=1e-8)


@pytest.mark.parametrize("k", [0.0, -1.0, 4.5])
def test_k_domain(k):
    with pytest.raises(ValueError):
        moment_coefficient(k)


def test_c_k_decreasing_on_experiment_range():
    ks = np.sqrt(1 + np.linspace(0, 3, 16))
    cs = [moment_coefficient(float(k)).c_k for k in ks]
    assert all(b < a for a, b in zip(cs, cs[1:]))
