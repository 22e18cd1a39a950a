import math

import numpy as np
import pytest
from scipy import special

from nsbf_spectra import CharacteristicApproximant, InputError, find_zeros
from nsbf_spectra.nsbf import SMALL_RHO_PI, dn_omega_hat, slot_centers

PI = math.pi
COEFFS = {
    "DD": np.array([-3.0, 0.41, -0.07, 0.012]),
    "DN": np.array([0.35, -0.12, 0.03]),
    "Robin": np.array([-1.2, 0.25, -0.04]),
}


def direct(kind, c, rho, omega_hat=None):
    """The approximant summed term by term with scipy's spherical_jn (complex rho allowed)."""
    rho = complex(rho)
    z = rho * PI
    n = np.arange(c.size)
    sgn = (-1.0) ** n
    if kind == "Robin":
        even = special.spherical_jn(2 * n, z)
        return (c[0] * (even[0] - np.cos(z)) + np.sum((sgn * c * even)[1:]) - rho * np.sin(z))
    odd = special.spherical_jn(2 * n + 1, z)
    tail = np.sum(sgn * c * odd) / rho
    if kind == "DD":
        return np.sin(z) / rho + tail
    return np.cos(z) + omega_hat * np.sin(z) / rho + tail


@pytest.mark.parametrize("kind", ["DD", "DN", "Robin"])
def test_eval_matches_direct_sum(kind):
    a = CharacteristicApproximant(kind, COEFFS[kind])
    rho = np.array([0.05, 0.7, 1.0, 3.3, 12.5, 57.0])
    ref = [direct(kind, a.coeffs, r, a.omega_hat).real for r in rho]
    assert np.allclose(a.eval(rho), ref, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("kind", ["DD", "DN", "Robin"])
def test_eval_lambda_negative_matches_complex_sum(kind):
    a = CharacteristicApproximant(kind, COEFFS[kind])
    lam = np.array([-0.01, -0.8, -4.0, -30.0])
    ref = [direct(kind, a.coeffs, 1j * math.sqrt(-v), a.omega_hat) for v in lam]
    assert np.all(np.abs(np.imag(ref)) <= 1e-12 * np.abs(ref))
    got = a.eval_lambda(lam)
    assert np.allclose(got, np.real(ref), rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("kind", ["DD", "DN", "Robin"])
def test_small_rho_branch_is_continuous(kind):
    a = CharacteristicApproximant(kind, COEFFS[kind])
    edge = SMALL_RHO_PI / PI
    below, above = a.eval(edge * (1 - 1e-9)), a.eval(edge * (1 + 1e-9))
    assert below == pytest.approx(above, rel=1e-8, abs=1e-10)
    # both sides of lambda = 0
    assert a.eval_lambda(-1e-14) == pytest.approx(a.eval_lambda(1e-14), rel=1e-8, abs=1e-10)
    assert np.isfinite(a.eval(0.0))


def test_free_dd_value_at_origin():
    # with s~_0 = -3 and nothing else: sin(z)/rho - 3 j_1(z)/rho -> pi - pi = 0 at rho = 0
    a = CharacteristicApproximant("DD", [-3.0])
    assert abs(a.eval(0.0)) < 1e-15


def test_dn_omega_hat_forced():
    a = CharacteristicApproximant("DN", [0.6, 0.1])
    assert a.omega_hat == pytest.approx(-0.2 - 1.0 / PI)
    assert dn_omega_hat(0.6) == a.omega_hat
    # zero is then a root of the DN approximant
    assert abs(a.eval(0.0)) < 1e-14


def test_validation():
    with pytest.raises(InputError):
        CharacteristicApproximant("DD", [-2.0, 0.1])
    with pytest.raises(InputError):
        CharacteristicApproximant("DN", [0.1], omega_hat=5.0)
    with pytest.raises(InputError):
        CharacteristicApproximant("Robin", [0.1], omega_hat=1.0)
    with pytest.raises(InputError):
        CharacteristicApproximant("XY", [0.1])
    with pytest.raises(InputError):
        CharacteristicApproximant("Robin", [np.nan])
    with pytest.raises(InputError):
        CharacteristicApproximant("Robin", [0.0]).eval(-1.0)


def test_coefficients_are_read_only():
    a = CharacteristicApproximant("Robin", [0.0, 1.0])
    with pytest.raises(ValueError):
        a.coeffs[0] = 3.0


def test_free_robin_zeros_are_integers():
    # h_n = 0: Phi(rho) = -rho sin(rho pi)
    a = CharacteristicApproximant("Robin", np.zeros(4))
    res = find_zeros(a, 1, 60, drift=0.0)
    assert res.ok
    assert np.allclose(res.zeros, np.arange(1, 61), atol=1e-13)


def test_free_dn_zeros():
    # sigma_0 = 0 forces omega_hat = -1/pi: cos(rho pi) - sin(rho pi)/(pi rho),
    # one root per slot just above k + 1/2
    a = CharacteristicApproximant("DN", [0.0])
    res = find_zeros(a, 1, 20, drift=0.0)
    assert res.ok
    assert np.all(np.abs(res.zeros - (np.arange(1, 21) + 0.5)) < 0.2)
    assert np.allclose(a.eval(res.zeros), 0.0, atol=1e-12)


def test_slot_centers_follow_drift():
    a = CharacteristicApproximant("DD", [-3.0])
    c = slot_centers(a, np.array([1, 2, 10]), drift=0.75)
    assert np.allclose(c, np.sqrt(np.array([1, 4, 100]) + 0.75))


def test_empty_search_range():
    a = CharacteristicApproximant("Robin", np.zeros(2))
    res = find_zeros(a, 5, 4)
    assert res.zeros.size == 0 and res.ok
    with pytest.raises(InputError):
        find_zeros(a, 0, 3)


def test_missing_root_reported():
    # a huge drift squeezes slot 3 into a sliver near rho = 100.05, between integer roots
    a = CharacteristicApproximant("Robin", np.zeros(1))
    failed = find_zeros(a, 3, 3, drift=1e4)
    assert failed.status == ["no_sign_change"] and np.isnan(failed.zeros[0])
    assert failed.failed == [(3, "no_sign_change")]
