"""Spherical Bessel functions of the first kind for real arguments.

The NSBF sums need whole columns j_0(z), ..., j_L(z) at many arguments, so the
workhorse here is :func:`spherical_jn_table`, vectorised over z.  Three regimes:

* ``|z| < 0.5``: ascending power series.
* orders up to ``|z|``: upward recurrence from the closed forms of j_0, j_1.
* orders above ``|z|``: Miller's downward recurrence, matched to the upward
  values at the two orders where the regimes meet.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

SERIES_THRESHOLD = 0.5
_SERIES_TERMS = 12
_RESCALE = 1e200


@dataclass(frozen=True)
class BesselSequence:
    max_order: int
    argument: float
    values: np.ndarray


def _check_args(max_order, z):
    if max_order < 0:
        raise InputError(f"order must be nonnegative, got {max_order}")
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise InputError("spherical Bessel argument must be finite")
    return z


def _double_factorial_odd(n):
    # (2n+1)!! for n = 0..len-1, as floats (inf beyond ~n=150 is fine: series
    # terms then underflow to zero anyway).
    k = np.arange(n + 1)
    with np.errstate(over="ignore"):
        return np.cumprod(2.0 * k + 1.0)


def _series_sums(max_order, a, modified=False, nterms=_SERIES_TERMS):
    """sum_k (-+a^2/2)^k / (k! prod_{j=1..k}(2n+2j+1)) for n = 0..max_order."""
    sums = np.zeros(a.shape + (max_order + 1,))
    half_sq = 0.5 * a * a if modified else -0.5 * a * a
    with np.errstate(under="ignore"):
        for n in range(max_order + 1):
            term = np.ones_like(a)
            total = np.ones_like(a)
            for k in range(1, nterms):
                term = term * half_sq / (k * (2 * n + 2 * k + 1))
                total = total + term
                if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
                    break
            sums[..., n] = total
    return sums


def _powers_over_dfac(max_order, a, shift=0):
    """a^(n-shift)/(2n+1)!! for n = 0..max_order (underflows quietly to 0)."""
    out = np.zeros(a.shape + (max_order + 1,))
    dfac = _double_factorial_odd(max_order)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        for n in range(max_order + 1):
            e = n - shift
            p = a**e if e > 0 else np.ones_like(a)
            out[..., n] = np.where(np.isfinite(dfac[n]), p / dfac[n], 0.0)
    return out


def _series_table(max_order, a, modified=False, nterms=_SERIES_TERMS):
    return _powers_over_dfac(max_order, a) * _series_sums(max_order, a, modified, nterms)


def _miller_start(max_order, a_max):
    return int(max_order + 20 + 2.0 * np.sqrt(max(max_order, a_max)) + 10)


def spherical_jn_table(max_order: int, z) -> np.ndarray:
    """Return ``T`` with ``T[..., n] = j_n(z)`` for ``n = 0..max_order``."""
    z = _check_args(max_order, z)
    shape = z.shape
    z = z.ravel()
    a = np.abs(z)
    L = max_order
    out = np.zeros((z.size, L + 1))

    small = a < SERIES_THRESHOLD
    if np.any(small):
        out[small] = _series_table(L, a[small])

    big = ~small
    if np.any(big):
        ab = a[big]
        tab = np.zeros((ab.size, L + 1))
        s, c = np.sin(ab), np.cos(ab)
        tab[:, 0] = s / ab
        if L >= 1:
            tab[:, 1] = s / ab**2 - c / ab
        # upward recurrence, each row only while the order stays below its argument
        n_up = np.minimum(np.maximum(np.floor(ab).astype(int), 1), L)
        for n in range(1, L):
            m = n + 1 <= n_up
            if not np.any(m):
                break
            tab[m, n + 1] = (2 * n + 1) / ab[m] * tab[m, n] - tab[m, n - 1]

        need = n_up < L
        if np.any(need):
            idx = np.nonzero(need)[0]
            ad = ab[idx]
            M = _miller_start(L, ad.max())
            down = np.zeros((idx.size, L + 1))
            f_next = np.zeros(idx.size)
            f_cur = np.full(idx.size, 1e-300)
            for n in range(M, 0, -1):
                f_prev = (2 * n + 1) / ad * f_cur - f_next
                if n - 1 <= L:
                    down[:, n - 1] = f_prev
                if n <= L:
                    down[:, n] = f_cur
                f_next, f_cur = f_cur, f_prev
                big_rows = np.abs(f_cur) > _RESCALE
                if np.any(big_rows):
                    f_cur[big_rows] /= _RESCALE
                    f_next[big_rows] /= _RESCALE
                    down[big_rows] /= _RESCALE
            nu = n_up[idx]
            p = np.maximum(nu - 1, 0)
            rows = np.arange(idx.size)
            u0, u1 = tab[idx, p], tab[idx, p + 1]
            d0, d1 = down[rows, p], down[rows, p + 1]
            mag = np.maximum(np.abs(d0), np.abs(d1))
            d0, d1 = d0 / mag, d1 / mag
            down /= mag[:, None]
            scale = (u0 * d0 + u1 * d1) / (d0 * d0 + d1 * d1)
            orders = np.arange(L + 1)
            replace = orders[None, :] > nu[:, None]
            sub = tab[idx]
            sub[replace] = (down * scale[:, None])[replace]
            tab[idx] = sub
        out[big] = tab

    neg = z < 0
    if np.any(neg):
        out[neg] *= (-1.0) ** np.arange(L + 1)
    return out.reshape(shape + (L + 1,))


def spherical_jn(order: int, z: float) -> float:
    """j_order(z) for real z."""
    if order < 0:
        raise InputError(f"order must be nonnegative, got {order}")
    return float(spherical_jn_table(order, np.float64(z))[order])


def spherical_jn_sequence(max_order: int, z: float) -> BesselSequence:
    values = spherical_jn_table(max_order, np.float64(z))
    return BesselSequence(max_order=max_order, argument=float(z), values=values)


def spherical_jn_over_z_table(max_order: int, z) -> np.ndarray:
    """j_n(z)/z for |z| < 0.5, finite at z = 0 (1/3 for n = 1, 0 for n >= 2).

    Column 0 is left as NaN: sin(z)/z^2 has no limit there.
    """
    z = _check_args(max_order, z)
    a = np.abs(z)
    if np.any(a >= SERIES_THRESHOLD):
        raise InputError("j_n(z)/z helper is for |z| < 0.5 only")
    tab = _powers_over_dfac(max_order, a, shift=1) * _series_sums(max_order, a)
    tab[..., 0] = np.nan
    if np.any(z < 0):
        # j_n(-z)/(-z) = (-1)^(n+1) j_n(z)/z
        tab = tab * np.where(z < 0, -1.0, 1.0)[..., None] ** (np.arange(max_order + 1) + 1)
    return tab


def modified_spherical_in_table(max_order: int, t) -> np.ndarray:
    """i_n(t) = (-i)^n j_n(i t) for real t via its all-positive ascending series.

    Needed when a spectral argument becomes imaginary; intended for moderate
    |t| (a few tens at most).
    """
    t = _check_args(max_order, t)
    a = np.abs(t)
    nterms = int(40 + 2 * np.max(a, initial=0.0))
    out = _series_table(max_order, a, modified=True, nterms=nterms)
    if np.any(t < 0):
        out = out * np.where(t < 0, -1.0, 1.0)[..., None] ** np.arange(max_order + 1)
    return out
