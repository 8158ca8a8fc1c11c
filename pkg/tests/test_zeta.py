from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from zetalab import _backend
from zetalab._dd import LOG_TABLE, t_log_n_mod_2pi
from zetalab.zeta import (
    LOG_ABS_FLOOR,
    count_sign_changes,
    grid_spacing,
    grid_spec,
    interval_max,
    interval_maxima,
    riemann_siegel_Z,
    riemann_von_mangoldt,
    z_on_grid,
    zeta_euler_maclaurin,
)


def mp_Z(t, h=0.0):
    # grid points are tau + h in exact arithmetic, not rounded to a double
    with mpmath.workdps(30):
        return float(mpmath.siegelz(mpmath.mpf(t) + mpmath.mpf(h)))


@pytest.mark.parametrize("t", [1e5 + 0.3, 271828.18, 1e6 + 17.5, 3.3e6])
def test_Z_against_mpmath(t):
    assert riemann_siegel_Z(t) == pytest.approx(mp_Z(t), abs=1e-9)


def test_Z_large_height():
    t = 1.5e9 + 0.25
    assert riemann_siegel_Z(t) == pytest.approx(mp_Z(t), abs=1e-7)


@pytest.mark.parametrize("backend", sorted(_backend.AVAILABLE))
def test_grid_matches_pointwise(backend):
    center, spacing = 2.5e6 + 0.1, 0.37
    offsets, z = z_on_grid(center, spacing, 40, backend)
    for j in [0, 13, 40, 80]:
        assert z[j] == pytest.approx(mp_Z(center, offsets[j]), abs=1e-9)


def test_grid_crossing_main_sum_length():
    # sqrt(t / 2 pi) crosses an integer inside the grid
    n = 400
    t_cross = 2 * math.pi * n * n
    offsets, z = z_on_grid(t_cross, 0.5, 20)
    for j in [0, 19, 20, 21, 40]:
        assert z[j] == pytest.approx(mp_Z(t_cross, offsets[j]), abs=1e-9)


def test_euler_maclaurin_oracle_against_mpmath():
    for t in [1e5 + 1.0, 2e5 + 0.5]:
        with mpmath.workdps(30):
            ref = complex(mpmath.zeta(mpmath.mpc(0.5, t)))
        assert abs(zeta_euler_maclaurin(t) - ref) < 1e-8


def test_phase_reduction_double_double():
    t = 1.2345678e9
    size = 50
    got = t_log_n_mod_2pi(t, size)
    with mpmath.workdps(50):
        ref = [float(mpmath.fmod(mpmath.mpf(t) * mpmath.log(n), 2 * mpmath.pi)) for n in range(1, size + 1)]
    diff = np.abs(np.angle(np.exp(1j * (got - np.array(ref)))))
    assert diff.max() < 1e-12


def test_log_table():
    hi, lo = LOG_TABLE.get(100)
    with mpmath.workdps(40):
        assert float(mpmath.log(97) - hi[96]) == pytest.approx(lo[96], abs=1e-30)


def test_grid_spec_examples():
    T = 1e7
    assert grid_spacing(T) == pytest.approx(2 * math.pi / math.log(T / (2 * math.pi)))
    assert grid_spacing(T) == pytest.approx(0.43999, abs=1e-5)
    spec1 = grid_spec(1.5 * T, T, 1.0)
    assert abs(spec1.n_points - (math.floor(2 * math.pi * math.log(T) / grid_spacing(T)) + 1)) <= 1
    assert 229 <= spec1.n_points <= 232
    spec0 = grid_spec(1.5 * T, T, 0.0)
    assert spec0.n_points == 2 * math.floor(math.pi / grid_spacing(T)) + 1
    assert len(spec0.offsets()) == spec0.n_points


def test_interval_max_properties():
    T = 1e6
    tau = 1.37e6
    samples = interval_maxima(tau, T, [0.0, 0.5, 1.0, 2.0])
    levels = [s.max_log_abs for s in samples]
    assert levels == sorted(levels)
    z0 = abs(riemann_siegel_Z(tau))
    assert samples[0].max_log_abs >= math.log(z0) - 1e-12
    single = interval_max(tau, T, 1.0)
    assert single.max_log_abs == pytest.approx(samples[2].max_log_abs, rel=1e-13)
    assert abs(single.argmax_offset) <= math.pi * math.log(T) + 1e-9


def test_log_abs_floor():
    assert LOG_ABS_FLOOR == -50.0
    from zetalab.zeta import _log_abs

    assert _log_abs(np.array([0.0, 1.0]))[0] == -50.0


def test_sign_changes_match_zero_count():
    a, b = 1e6, 1e6 + 200.0
    changes = count_sign_changes(a, b)
    expected = riemann_von_mangoldt(b) - riemann_von_mangoldt(a)
    assert abs(changes - expected) <= 3


def test_domain():
    with pytest.raises(ValueError):
        riemann_siegel_Z(5e4)
    with pytest.raises(ValueError):
        interval_maxima(1e7, 1e7, [3.5])
