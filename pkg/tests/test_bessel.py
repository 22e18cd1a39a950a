import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from nsbf_spectra.bessel import (modified_spherical_in_table, spherical_jn, spherical_jn_over_z_table,
                                 spherical_jn_sequence, spherical_jn_table)

mpmath.mp.dps = 40


def mp_jn(n, z):
    """j_n(z) = sqrt(pi/(2z)) J_{n+1/2}(z) in 40-digit arithmetic."""
    z = mpmath.mpf(z)
    return float(mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.besselj(n + mpmath.mpf(1) / 2, z))


def mp_in(n, t):
    t = mpmath.mpf(t)
    return float(mpmath.sqrt(mpmath.pi / (2 * t)) * mpmath.besseli(n + mpmath.mpf(1) / 2, t))


Z_CLOSED = np.geomspace(1e-6, 100.0, 400)


def test_j0_j1_closed_forms():
    # closed forms evaluated in extended precision so cancellation at small z is not ours
    ref0 = [float(mpmath.sin(z) / z) for z in map(mpmath.mpf, Z_CLOSED)]
    ref1 = [float(mpmath.sin(z) / z**2 - mpmath.cos(z) / z) for z in map(mpmath.mpf, Z_CLOSED)]
    J = spherical_jn_table(1, Z_CLOSED)
    assert np.max(np.abs(J[:, 0] - ref0)) <= 1e-13
    assert np.max(np.abs(J[:, 1] - ref1)) <= 1e-13


@pytest.mark.parametrize("n", [0, 1, 2, 5, 13, 40, 101])
def test_against_half_integer_bessel(n):
    z = np.array([1e-3, 0.3, 0.49, 0.51, 2.0, 7.5, 31.0, 99.0, 480.0])
    ref = np.array([mp_jn(n, v) for v in z])
    got = spherical_jn_table(n, z)[:, n]
    scale = np.maximum(np.abs(ref), 1e-300)
    small = np.abs(ref) < 1e-280
    rel = np.where(small, 0.0, np.abs(got - ref) / scale)
    assert np.all(rel[np.abs(ref) > 1e-30] <= 1e-12)
    assert np.all(np.abs(got - ref) <= 1e-15)


def test_matches_scipy_on_wide_range():
    z = np.concatenate([np.geomspace(1e-4, 1e4, 200), [0.0]])
    J = spherical_jn_table(200, z)
    n = np.arange(201)
    ref = special.spherical_jn(n[None, :], z[:, None])
    assert np.max(np.abs(J - ref)) < 5e-15


def test_negative_argument_parity():
    z = np.linspace(0.1, 30, 50)
    Jp = spherical_jn_table(12, z)
    Jm = spherical_jn_table(12, -z)
    assert np.allclose(Jm, Jp * (-1.0) ** np.arange(13), rtol=0, atol=1e-15)


def test_values_at_zero():
    J = spherical_jn_table(6, 0.0)
    assert J[0] == 1.0 and np.all(J[1:] == 0.0)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(min_value=1, max_value=50), z=st.floats(min_value=1e-3, max_value=500.0))
def test_recurrence_residual(n, z):
    j = spherical_jn_table(n + 1, z)
    res = j[n - 1] + j[n + 1] - (2 * n + 1) / z * j[n]
    assert abs(res) <= 1e-10


def test_high_order_decay_without_overflow():
    J = spherical_jn_table(300, np.array([0.5, 5.0, 50.0]))
    assert np.all(np.isfinite(J))
    tail = np.abs(J[:, 250:])
    assert np.all(np.diff(tail, axis=1) <= 0)
    assert tail[0, -1] < 1e-300 or tail[0, -1] == 0.0


def test_scalar_helpers_agree_with_table():
    assert spherical_jn(4, 10.0) == pytest.approx(-0.10558928511769167, abs=1e-16)
    seq = spherical_jn_sequence(7, 3.3)
    assert np.allclose(np.asarray(seq.values), spherical_jn_table(7, 3.3), atol=1e-16)


def test_jn_over_z_regular_at_origin():
    z = np.array([0.0, 1e-8, 1e-3, 0.2, 0.45])
    T = spherical_jn_over_z_table(7, z)
    # j_1(z)/z -> 1/3 and j_n(z)/z -> 0 for n >= 2
    assert T[0, 1] == pytest.approx(1.0 / 3.0, abs=1e-16)
    assert np.all(T[0, 2:] == 0.0)
    ref = np.array([[mp_jn(n, v) / v for n in range(1, 8)] for v in z[1:]])
    assert np.allclose(T[1:, 1:], ref, rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("t", [1e-4, 0.3, 2.0, 9.0, 40.0])
def test_modified_spherical_against_mpmath(t):
    got = modified_spherical_in_table(15, t)
    ref = np.array([mp_in(n, t) for n in range(16)])
    assert np.allclose(got, ref, rtol=1e-13, atol=0)


def test_bad_arguments_rejected():
    from nsbf_spectra import InputError
    with pytest.raises(InputError):
        spherical_jn_table(-1, 1.0)
    with pytest.raises(InputError):
        spherical_jn_table(3, np.nan)
    with pytest.raises(ValueError):
        spherical_jn_over_z_table(3, 0.7)
