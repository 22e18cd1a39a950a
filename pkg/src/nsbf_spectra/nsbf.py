"""Truncated NSBF characteristic functions at x = pi and their real zeros.

Three approximants are supported, all written in a shifted spectral variable
in which the first eigenvalue sits at zero:

* ``DD``    S~_N(rho, pi) = sin(rho pi)/rho + (1/rho) sum (-1)^n s~_n j_{2n+1}(rho pi)
* ``DN``    S^'_N(rho, pi) = cos(rho pi) + w^ sin(rho pi)/rho
                             + (1/rho) sum (-1)^n sigma^_n j_{2n+1}(rho pi)
* ``Robin`` Phi_N(rho) = h_0 (j_0(rho pi) - cos(rho pi))
                         + sum_{n>=1} (-1)^n h_n j_{2n}(rho pi) - rho sin(rho pi)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .bessel import modified_spherical_in_table, spherical_jn_over_z_table, spherical_jn_table
from .errors import InputError

PI = math.pi
SMALL_RHO_PI = 1e-2
SCAN_POINTS = 64

KINDS = ("DD", "DN", "Robin")


def dn_omega_hat(sigma0: float) -> float:
    """omega^ forced by zero being the first shifted DN eigenvalue."""
    return -sigma0 / 3.0 - 1.0 / PI


@dataclass(frozen=True)
class CharacteristicApproximant:
    kind: str
    coeffs: np.ndarray
    shift: float = 0.0
    omega_hat: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown approximant kind {self.kind!r}")
        c = np.array(self.coeffs, dtype=float)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        if c.ndim != 1 or c.size < 1:
            raise InputError("an approximant needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise InputError("approximant coefficients must be finite")
        if self.kind == "DD" and c[0] != -3.0:
            raise InputError("DD approximant must have s~_0(pi) = -3")
        if self.kind == "DN":
            expected = dn_omega_hat(c[0])
            if self.omega_hat is None:
                object.__setattr__(self, "omega_hat", expected)
            elif not math.isclose(self.omega_hat, expected, rel_tol=1e-14, abs_tol=1e-14):
                raise InputError("DN approximant: omega_hat must equal -sigma_0/3 - 1/pi")
        elif self.omega_hat is not None:
            raise InputError("omega_hat only applies to DN approximants")

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    @property
    def _signed(self):
        return self.coeffs * (-1.0) ** np.arange(self.coeffs.size)

    def __call__(self, rho):
        return self.eval(rho)

    def eval(self, rho):
        """Evaluate at real rho >= 0 in the shifted variable (vectorised)."""
        rho = np.asarray(rho, dtype=float)
        if np.any(rho < 0):
            raise InputError("evaluate at rho >= 0; use eval_lambda for negative lambda")
        z = rho * PI
        N = self.N
        out = np.empty_like(z)
        small = z < SMALL_RHO_PI
        big = ~small

        if np.any(big):
            zb, rb = z[big], rho[big]
            if self.kind == "Robin":
                J = spherical_jn_table(2 * N, zb)
                even = J[..., 0::2]
                val = self.coeffs[0] * (even[..., 0] - np.cos(zb)) - rb * np.sin(zb)
                if N:
                    val = val + even[..., 1:] @ self._signed[1:]
                out[big] = val
            else:
                J = spherical_jn_table(2 * N + 1, zb)
                tail = (J[..., 1::2] @ self._signed) / rb
                if self.kind == "DD":
                    out[big] = np.sin(zb) / rb + tail
                else:
                    out[big] = np.cos(zb) + self.omega_hat * np.sin(zb) / rb + tail

        if np.any(small):
            zs = z[small]
            with np.errstate(invalid="ignore", divide="ignore"):
                sinc = np.where(zs > 0, np.sin(zs) / np.where(zs > 0, zs, 1.0), 1.0)
            if self.kind == "Robin":
                J = spherical_jn_table(2 * N, zs)
                val = self.coeffs[0] * (J[..., 0] - np.cos(zs)) - rho[small] * np.sin(zs)
                if N:
                    val = val + J[..., 2::2] @ self._signed[1:]
                out[small] = val
            else:
                # (1/rho) j_k(rho pi) = pi * j_k(z)/z, regular at z = 0
                Jz = spherical_jn_over_z_table(2 * N + 1, zs)
                tail = PI * (Jz[..., 1::2] @ self._signed)
                if self.kind == "DD":
                    out[small] = PI * sinc + tail
                else:
                    out[small] = np.cos(zs) + self.omega_hat * PI * sinc + tail
        return out if out.ndim else float(out)

    def eval_lambda(self, lam):
        """Evaluate at lambda = rho^2 in the shifted variable; lambda < 0 allowed."""
        lam = np.asarray(lam, dtype=float)
        out = np.empty_like(lam)
        pos = lam >= 0
        if np.any(pos):
            out[pos] = self.eval(np.sqrt(lam[pos]))
        neg = ~pos
        if np.any(neg):
            # rho = i t: j_k(i z) = i^k i_k(z), so every term stays real
            t = np.sqrt(-lam[neg])
            z = t * PI
            N = self.N
            if self.kind == "Robin":
                I = modified_spherical_in_table(2 * N, z)
                val = self.coeffs[0] * (I[..., 0] - np.cosh(z)) + t * np.sinh(z)
                if N:
                    val = val + I[..., 2::2] @ self.coeffs[1:]
            else:
                I = modified_spherical_in_table(2 * N + 1, z)
                tail = (I[..., 1::2] @ self.coeffs) / t
                if self.kind == "DD":
                    val = np.sinh(z) / t + tail
                else:
                    val = np.cosh(z) + self.omega_hat * np.sinh(z) / t + tail
            out[neg] = val
        return out if out.ndim else float(out)

    def index_position(self, k):
        """Unperturbed position of the k-th root: k (DD, Robin) or k + 1/2 (DN)."""
        return np.asarray(k, dtype=float) + (0.5 if self.kind == "DN" else 0.0)


@dataclass
class ZeroSearch:
    indices: np.ndarray
    zeros: np.ndarray
    status: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s == "ok" for s in self.status)

    @property
    def failed(self):
        return [(int(k), s) for k, s in zip(self.indices, self.status) if s != "ok"]


def slot_centers(approx: CharacteristicApproximant, ks, drift: float):
    """Predicted root positions sqrt(nu_k^2 + drift), nu_k the unperturbed index position."""
    nu = approx.index_position(ks)
    return np.sqrt(np.maximum(nu * nu + drift, 0.0))


def find_zeros(approx: CharacteristicApproximant, k_min: int, k_max: int,
               drift: float | None = None) -> ZeroSearch:
    """One root per index slot k = k_min..k_max of the shifted variable.

    Slot k is centred at the predicted root sqrt(nu_k^2 + drift) and bounded
    by the midpoints to its neighbours' centres, so slots tile the axis.  Each
    slot is scanned at 64 subintervals; a single sign change is refined with
    Brent's method.  Slots with no sign change keep a NaN root and status
    ``"no_sign_change"``; slots with several keep the root closest to the
    centre and are marked ``"multiple"``.
    """
    if k_max < k_min:
        return ZeroSearch(np.arange(0), np.zeros(0), [])
    if k_min < 1:
        raise InputError("zero search starts past the first (fixed) root")
    if drift is None:
        drift = {"DD": -1.0, "DN": 2.0 * (approx.omega_hat or 0.0) / PI,
                 "Robin": -2.0 * approx.coeffs[0] / PI}[approx.kind]
    ks = np.arange(k_min, k_max + 1)
    centers = slot_centers(approx, np.arange(k_min - 1, k_max + 2), drift)
    edges = 0.5 * (centers[:-1] + centers[1:])
    lo, hi = edges[:-1], edges[1:]
    t = np.linspace(0.0, 1.0, SCAN_POINTS + 1)
    grid = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    vals = approx.eval(grid)
    zeros = np.full(ks.size, np.nan)
    status = []
    for i, k in enumerate(ks):
        v = vals[i]
        sgn = np.sign(v)
        exact = np.nonzero(v == 0.0)[0]
        changes = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
        cands = [float(grid[i, j]) for j in exact]
        for j in changes:
            a, b = grid[i, j], grid[i, j + 1]
            r = optimize.brentq(approx.eval, a, b, xtol=1e-15 * (1.0 + b),
                                rtol=4 * np.finfo(float).eps, maxiter=200)
            cands.append(r)
        cands = sorted(set(cands))
        if not cands:
            status.append("no_sign_change")
            continue
        center = 0.5 * (lo[i] + hi[i])
        root = min(cands, key=lambda r: abs(r - center))
        zeros[i] = root
        if len(cands) > 1:
            status.append("multiple")
        elif abs(approx.eval(root)) > 1e-12 * (1.0 + root):
            status.append("residual")
        else:
            status.append("ok")
    return ZeroSearch(ks, zeros, status)
