"""Spectrum completion from a handful of eigenvalues.

Each pipeline shifts the given eigenvalues so the first one becomes zero,
recovers the NSBF coefficients at x = pi from a small least-squares system, and
locates further roots of the resulting characteristic approximant.  Nothing
about the potential (or the Robin constants h, H) is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .bessel import spherical_jn_table
from .errors import IllConditionedError, InputError, NumericalError
from .forward import Spectrum
from .nsbf import CharacteristicApproximant, dn_omega_hat, find_zeros

PI = math.pi
REGULARIZATION_RCOND = 1e-12
MAX_CONDITION = 1e14


@dataclass
class CompletionReport:
    input: Spectrum
    approximant: CharacteristicApproximant
    completed_indices: np.ndarray
    completed_eigenvalues: np.ndarray
    per_slot_status: list
    lsq_residual_norm: float
    condition: float
    omega_estimate: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def completed(self) -> Spectrum:
        """The completed part as a Spectrum (None if empty); raises if any slot failed."""
        bad = [(int(k), s) for k, s in zip(self.completed_indices, self.per_slot_status)
               if s != "ok"]
        if bad:
            raise NumericalError(f"zero search failed on slots {bad}")
        if self.completed_indices.size == 0:
            return None
        return Spectrum(self.input.bc, self.completed_eigenvalues, int(self.completed_indices[0]))

    def full_spectrum(self) -> Spectrum:
        """Given eigenvalues followed by the completed ones."""
        done = self.completed
        if done is None:
            return self.input
        ev = np.concatenate([self.input.eigenvalues, done.eigenvalues])
        return Spectrum(self.input.bc, ev, self.input.start)


def solve_least_squares(A, b, regularize: bool = False):
    """Least-squares solution via the SVD-based LAPACK driver.

    Returns (x, residual_norm, condition).  Without ``regularize`` a matrix
    whose numerical rank falls short of min(m, n) is rejected; with it, singular
    values below 1e-12 of the largest are truncated.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    sv = scipy.linalg.svdvals(A)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if not regularize and cond > MAX_CONDITION:
        raise IllConditionedError(
            f"coefficient system is numerically rank deficient (condition ~ {cond:.3g})", cond)
    rcond = REGULARIZATION_RCOND if regularize else None
    x, _, _, _ = scipy.linalg.lstsq(A, b, cond=rcond, lapack_driver="gelsd")
    res = float(np.linalg.norm(A @ x - b))
    return x, res, cond


def _check_given(given: Spectrum, kind: str):
    if not isinstance(given, Spectrum):
        raise InputError("expected a Spectrum")
    if given.bc.kind != kind:
        raise InputError(f"expected a {kind} spectrum, got {given.bc.kind}")
    if given.start != given.bc.index_offset:
        raise InputError("the given eigenvalues must start with the first one of the spectrum")


def _drift(shifted_last: float, nu_last: float) -> float:
    return shifted_last - nu_last * nu_last


def _complete(given, approx, k_first, k_max, nu_last):
    shift = float(given.eigenvalues[0])
    drift = _drift(float(given.eigenvalues[-1]) - shift, nu_last)
    search = find_zeros(approx, k_first, k_max, drift=drift)
    lam = search.zeros ** 2 + shift
    return search.indices, lam, search.status


def complete_dd(given: Spectrum, N: int | None = None, k_max: int | None = None,
                regularize: bool = False) -> CompletionReport:
    """Complete a Dirichlet-Dirichlet spectrum from lambda_1..lambda_N1."""
    _check_given(given, "DD")
    n1 = len(given)
    if n1 < 2:
        raise InputError("DD completion needs at least two eigenvalues")
    if N is None:
        N = n1 - 1
    if not 1 <= N <= n1 + 1:
        raise InputError(f"DD completion needs 1 <= N <= {n1 + 1}, got {N}")
    if k_max is None:
        k_max = n1
    shift = float(given.eigenvalues[0])
    mu = np.sqrt(given.eigenvalues[1:] - shift)
    z = mu * PI
    J = spherical_jn_table(2 * N + 1, z)
    signs = (-1.0) ** np.arange(1, N + 1)
    A = J[:, 3::2] * signs
    b = 3.0 * J[:, 1] - np.sin(z)
    x, res, cond = solve_least_squares(A, b, regularize)
    approx = CharacteristicApproximant("DD", np.concatenate([[-3.0], x]), shift)
    idx, lam, status = _complete(given, approx, n1 + 1, k_max, float(n1))
    return CompletionReport(given, approx, idx, lam, status, res, cond)


def complete_dn(given: Spectrum, N: int | None = None, k_max: int | None = None,
                regularize: bool = False) -> CompletionReport:
    """Complete a Dirichlet-Neumann spectrum from lambda_0..lambda_N2; also estimates omega."""
    _check_given(given, "DN")
    n2 = len(given) - 1
    if n2 < 1:
        raise InputError("DN completion needs at least two eigenvalues")
    if N is None:
        N = n2 - 1
    if not 0 <= N <= n2 - 1:
        raise InputError(f"DN completion needs 0 <= N <= {n2 - 1}, got {N}")
    if k_max is None:
        k_max = n2
    shift = float(given.eigenvalues[0])
    rho = np.sqrt(given.eigenvalues[1:] - shift)
    z = rho * PI
    J = spherical_jn_table(2 * N + 1, z)
    A = J[:, 1::2] * (-1.0) ** np.arange(N + 1)
    A[:, 0] = J[:, 1] - np.sin(z) / 3.0
    b = -rho * np.cos(z) + np.sin(z) / PI
    x, res, cond = solve_least_squares(A, b, regularize)
    approx = CharacteristicApproximant("DN", x, shift)
    omega_hat = dn_omega_hat(x[0])
    idx, lam, status = _complete(given, approx, n2 + 1, k_max, n2 + 0.5)
    omega = omega_hat + 0.5 * PI * shift
    return CompletionReport(given, approx, idx, lam, status, res, cond, omega,
                            {"omega_hat": omega_hat})


def complete_robin(given: Spectrum, N: int | None = None, k_max: int | None = None,
                   regularize: bool = False) -> CompletionReport:
    """Complete a Robin spectrum (h, H unknown) from lambda_0..lambda_N3.

    ``omega_estimate`` is h + H + omega of the shifted problem (q minus the
    first eigenvalue), i.e. -h_0.
    """
    _check_given(given, "Robin")
    n3 = len(given) - 1
    if n3 < 1:
        raise InputError("Robin completion needs at least two eigenvalues")
    if N is None:
        N = n3 - 1
    if not 0 <= N <= n3 - 1:
        raise InputError(f"Robin completion needs 0 <= N <= {n3 - 1}, got {N}")
    if k_max is None:
        k_max = n3
    shift = float(given.eigenvalues[0])
    rho = np.sqrt(given.eigenvalues[1:] - shift)
    z = rho * PI
    J = spherical_jn_table(2 * N, z)
    A = J[:, 0::2] * (-1.0) ** np.arange(N + 1)
    A[:, 0] = J[:, 0] - np.cos(z)
    b = rho * np.sin(z)
    x, res, cond = solve_least_squares(A, b, regularize)
    approx = CharacteristicApproximant("Robin", x, shift)
    idx, lam, status = _complete(given, approx, n3 + 1, k_max, float(n3))
    omega_bar = -float(x[0])
    return CompletionReport(given, approx, idx, lam, status, res, cond, omega_bar,
                            {"omega_bar_unshifted": omega_bar + 0.5 * PI * shift})


def complete(given: Spectrum, N: int | None = None, k_max: int | None = None,
             regularize: bool = False) -> CompletionReport:
    fn = {"DD": complete_dd, "DN": complete_dn, "Robin": complete_robin}[given.bc.kind]
    return fn(given, N, k_max, regularize)


def asymptotic_ck(given: Spectrum, omega: float) -> np.ndarray:
    """c_k = pi k (mu_k - k) - omega for each given DD index k."""
    if given.bc.kind != "DD":
        raise InputError("c_k diagnostic is defined for DD spectra")
    if not math.isfinite(omega):
        raise InputError("omega must be finite")
    k = given.indices.astype(float)
    mu = np.sqrt(given.eigenvalues)
    return PI * k * (mu - k) - omega


def asymptotic_dd(k, omega: float):
    """mu_k ~ k + omega/(pi k)."""
    k = np.asarray(k, dtype=float)
    return k + omega / (PI * k)
