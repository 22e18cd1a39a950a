"""Two-spectra inverse problem: recover q(x) from DD and DN eigenvalues.

Pipeline:

1. complete both spectra (the DD side only provides the approximant S~_N);
2. beta_k = S(rho_k, pi) from S~_N at the DN roots rho_k;
3. at every grid point x_m solve, in the least-squares sense over k,

     (1/rho_k) sum_n (-1)^n s_n(x) j_{2n+1}(rho_k x)
         - beta_k sum_n (-1)^n tau_n(x) j_{2n}(rho_k (pi - x))
       = -sin(rho_k x)/rho_k + beta_k cos(rho_k (pi - x));

4. q = (x s_0)'' / (x s_0 + 3x)  or  q = tau_0'' / (tau_0 + 1), with the
   second derivatives taken from penalised cubic splines (GCV-tuned) fitted
   on the well-conditioned part of the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.interpolate import BSpline

from .bessel import spherical_jn_table
from .completion import CompletionReport, complete_dd, complete_dn
from .errors import InputError, NumericalError
from .forward import PotentialModel, Spectrum, eigenvalues
from .nsbf import CharacteristicApproximant

PI = math.pi
DENOMINATOR_GUARD = 1e-3
DEFAULT_MARGIN = PI / 100
BLEND_POINTS = 10
POINT_RCOND = 1e-10
SPLINE_DEGREE = 3
SPLINE_KNOTS = 40
PENALTY_ORDER = 3
LOG_LAMBDA_GRID = np.arange(-12.0, 4.0, 0.25)
TRUST_RATIO = 1e3
SPLIT_OVERLAP = PI / 8


@dataclass
class InverseSolution:
    grid: np.ndarray
    n_coeffs: int
    s_table: np.ndarray
    tau_table: np.ndarray
    betas: np.ndarray
    rhos: np.ndarray
    q_from_s: np.ndarray | None = None
    q_from_tau: np.ndarray | None = None
    q_final: np.ndarray | None = None
    flagged: np.ndarray | None = None
    rank_deficient: np.ndarray | None = None
    condition: np.ndarray | None = None
    trusted: np.ndarray | None = None
    q_ends: tuple | None = None
    q_smooth: np.ndarray | None = None
    merge: str = "split"
    reports: dict = field(default_factory=dict)

    def potential_table(self):
        """(x, q) on [0, pi] from the merged fit, including the fitted end values.

        Points flagged only for a rank-deficient local system still carry a
        valid fitted value (their data never entered the fit) and are kept.
        """
        if self.q_final is None:
            raise InputError("potential has not been recovered yet")
        q_all = self.q_smooth if self.q_smooth is not None else self.q_final
        keep = np.isfinite(q_all)
        x, q = self.grid[keep], q_all[keep]
        if x.size < 5:
            raise NumericalError("too few valid grid points to build a potential")
        left, right = self.q_ends if self.q_ends is not None else (np.nan, np.nan)
        if not np.isfinite(left):
            left = np.polyval(np.polyfit(x[:5], q[:5], 2), 0.0)
        if not np.isfinite(right):
            right = np.polyval(np.polyfit(x[-5:], q[-5:], 2), PI)
        return np.concatenate([[0.0], x, [PI]]), np.concatenate([[left], q, [right]])

    def potential_model(self, name="recovered") -> PotentialModel:
        x, q = self.potential_table()
        return PotentialModel.from_table(x, q, name)


def make_grid(M: int = 200, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    if M < 5:
        raise InputError("grid needs at least 5 points")
    if not 0 < margin < PI / 2:
        raise InputError("grid margin must lie in (0, pi/2)")
    return np.linspace(margin, PI - margin, M)


def compute_betas(dn_rhos, dd_approx: CharacteristicApproximant,
                  mu1_sq: float | None = None) -> np.ndarray:
    """beta_k = S(rho_k, pi), read off the DD approximant.

    S(rho, x) = S~(sqrt(rho^2 - mu_1^2), x); the argument is imaginary for
    rho_k < mu_1 (always the case for k = 0) and handled through eval_lambda.
    """
    if dd_approx.kind != "DD":
        raise InputError("betas need the DD approximant")
    rhos = np.asarray(dn_rhos, dtype=float)
    if not np.all(np.isfinite(rhos)):
        raise InputError("DN roots must be real and finite")
    if mu1_sq is None:
        mu1_sq = dd_approx.shift
    betas = np.asarray(dd_approx.eval_lambda(rhos**2 - mu1_sq), dtype=float)
    tiny = np.abs(betas) < 1e-12
    if np.any(tiny):
        raise NumericalError(
            f"degenerate multipliers at k = {np.nonzero(tiny)[0].tolist()}: "
            "DN and DD data are inconsistent")
    return betas


def solve_coefficient_system(rhos, betas, grid, Nc: int, return_condition: bool = False,
                             rcond: float | None = POINT_RCOND):
    """Per-point least-squares solve for s_n(x_m), tau_n(x_m), n = 0..Nc.

    Singular values below ``rcond`` times the largest are truncated; a point
    where that happens is reported as rank deficient.  Returns (s_table,
    tau_table, rank_deficient) with tables shaped (Nc+1, M), plus the
    per-point condition numbers when ``return_condition`` is set.
    """
    rhos = np.asarray(rhos, dtype=float)
    betas = np.asarray(betas, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if rhos.shape != betas.shape:
        raise InputError("rhos and betas must have the same length")
    if rhos.size < 2 * (Nc + 1):
        raise InputError(f"need at least {2 * (Nc + 1)} eigenvalues for Nc = {Nc}")
    if np.any(rhos <= 0):
        raise InputError("DN roots must be positive")
    if np.any((grid <= 0) | (grid >= PI)):
        raise InputError("grid points must lie strictly inside (0, pi)")
    signs = (-1.0) ** np.arange(Nc + 1)
    Js = spherical_jn_table(2 * Nc + 1, np.outer(rhos, grid))[..., 1::2]
    Jt = spherical_jn_table(2 * Nc, np.outer(rhos, PI - grid))[..., 0::2]
    rhs_all = (-np.sin(np.outer(rhos, grid)) / rhos[:, None]
               + betas[:, None] * np.cos(np.outer(rhos, PI - grid)))
    s_tab = np.empty((Nc + 1, grid.size))
    t_tab = np.empty((Nc + 1, grid.size))
    deficient = np.zeros(grid.size, dtype=bool)
    cond = np.empty(grid.size)
    for m in range(grid.size):
        A = np.hstack([Js[:, m, :] * signs / rhos[:, None],
                       -betas[:, None] * Jt[:, m, :] * signs])
        x, _, rank, sv = scipy.linalg.lstsq(A, rhs_all[:, m], cond=rcond,
                                            lapack_driver="gelsd")
        deficient[m] = rank < A.shape[1]
        cond[m] = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
        s_tab[:, m] = x[: Nc + 1]
        t_tab[:, m] = x[Nc + 1:]
    if return_condition:
        return s_tab, t_tab, deficient, cond
    return s_tab, t_tab, deficient


def penalized_fit(x, y, prefactor=None, a=None, b=None):
    """Fit y ~ prefactor(x) * v(x) with v a penalised cubic B-spline on [a, b].

    Uniform knots, a third-difference penalty on the coefficients and the
    penalty weight chosen by generalized cross-validation.  Where [a, b]
    reaches past the data the penalty continues v as a low-order polynomial.
    Returns v as a BSpline.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = float(x[0]) if a is None else float(a)
    b = float(x[-1]) if b is None else float(b)
    k = SPLINE_DEGREE
    t = np.concatenate([[a] * k, np.linspace(a, b, SPLINE_KNOTS), [b] * k])
    B = BSpline.design_matrix(x, t, k).toarray()
    if prefactor is not None:
        B *= prefactor(x)[:, None]
    nb = B.shape[1]
    n = x.size
    if n < PENALTY_ORDER + 2:
        raise NumericalError("too few points for a smoothing fit")
    D = np.diff(np.eye(nb), PENALTY_ORDER, axis=0)
    BtB, Bty, DtD = B.T @ B, B.T @ y, D.T @ D
    best = None
    for lam in 10.0 ** LOG_LAMBDA_GRID:
        try:
            cho = scipy.linalg.cho_factor(BtB + lam * DtD)
        except np.linalg.LinAlgError:
            continue
        c = scipy.linalg.cho_solve(cho, Bty)
        edf = np.trace(scipy.linalg.cho_solve(cho, BtB))
        if n - edf <= 0:
            continue
        gcv = n * float(np.sum((B @ c - y) ** 2)) / (n - edf) ** 2
        if best is None or gcv < best[0]:
            best = (gcv, c)
    if best is None:
        raise NumericalError("smoothing fit failed for every penalty weight")
    return BSpline(t, best[1], k)


def _trusted(sol: InverseSolution) -> np.ndarray:
    """Grid points whose local system is within TRUST_RATIO of the best conditioned one."""
    if sol.condition is None:
        cond = np.ones(sol.grid.size)
    else:
        cond = np.asarray(sol.condition, dtype=float)
    ok = np.isfinite(cond)
    if sol.rank_deficient is not None:
        ok &= ~sol.rank_deficient
    if not np.any(ok):
        raise NumericalError("no grid point has a usable coefficient system")
    return ok & (cond <= TRUST_RATIO * np.min(cond[ok]))


def _q_via_s(x, s0, xe):
    """q from x s0 = x^3 v, the x^3 factor encoding S(0, x) = x + O(x^3)."""
    v = penalized_fit(x, x * s0, lambda z: z ** 3, 0.0, max(xe[-1], x[-1]))
    vv, v1, v2 = v(xe), v(xe, 1), v(xe, 2)
    den = xe ** 3 * vv + 3.0 * xe
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (6.0 * vv + 6.0 * xe * v1 + xe ** 2 * v2) / (xe ** 2 * vv + 3.0)
    return q, den


def _q_via_tau(x, tau0, xe):
    """q from tau0 = (pi - x)^2 u, encoding tau0(pi) = tau0'(pi) = 0."""
    u = penalized_fit(x, tau0, lambda z: (PI - z) ** 2, min(xe[0], x[0]), PI)
    d = PI - xe
    uu, u1, u2 = u(xe), u(xe, 1), u(xe, 2)
    den = d * d * uu + 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (2.0 * uu - 4.0 * d * u1 + d * d * u2) / den
    return q, den


def _blend_weights(grid):
    """Weight of the left-half formula: 1 left of the blend window, 0 right of it."""
    mid = np.searchsorted(grid, PI / 2)
    lo = max(mid - BLEND_POINTS // 2, 0)
    hi = min(lo + BLEND_POINTS, grid.size)
    w = np.zeros(grid.size)
    w[:lo] = 1.0
    if hi > lo:
        w[lo:hi] = np.linspace(1.0, 0.0, hi - lo + 2)[1:-1]
    return w


def recover_potential(sol: InverseSolution, merge: str | None = None) -> InverseSolution:
    """Fill q_from_s, q_from_tau, q_final, the end values and the flag mask.

    Only grid points with a well-conditioned local system (``trusted``) enter
    the fits.  x s0 is fitted as x^3 v(x) and tau0 as (pi - x)^2 u(x), so both
    fits carry the exact boundary behaviour and reach x = 0 and x = pi without
    extrapolation.

    merge: ``"split"`` uses q from s_0 on [0, pi/2) and q from tau_0 on
    [pi/2, pi] with a 10-point blend; each formula is fitted on its half plus
    SPLIT_OVERLAP and is NaN elsewhere.  ``"s"`` and ``"tau"`` fit one formula
    on the whole grid.
    """
    merge = merge or sol.merge
    if merge not in ("split", "s", "tau"):
        raise InputError(f"unknown merge rule {merge!r}")
    x = sol.grid
    M = x.size
    xe = np.concatenate([[0.0], x, [PI]])
    trusted = _trusted(sol)
    if merge == "split":
        left_e = xe < PI / 2 + SPLIT_OVERLAP
        right_e = xe > PI / 2 - SPLIT_OVERLAP
    else:
        left_e = right_e = np.ones(M + 2, dtype=bool)
    q_s = np.full(M + 2, np.nan)
    q_t = np.full(M + 2, np.nan)
    den_s = np.full(M + 2, np.nan)
    den_t = np.full(M + 2, np.nan)
    if merge in ("split", "s"):
        use = trusted & left_e[1:-1]
        if use.sum() < PENALTY_ORDER + 2:
            raise NumericalError("too few well-conditioned grid points left of the blend")
        q_s[left_e], den_s[left_e] = _q_via_s(x[use], sol.s_table[0, use], xe[left_e])
    if merge in ("split", "tau"):
        use = trusted & right_e[1:-1]
        if use.sum() < PENALTY_ORDER + 2:
            raise NumericalError("too few well-conditioned grid points right of the blend")
        q_t[right_e], den_t[right_e] = _q_via_tau(x[use], sol.tau_table[0, use], xe[right_e])
    with np.errstate(invalid="ignore"):
        bad_s = ~(np.abs(den_s) >= DENOMINATOR_GUARD)
        bad_t = ~(np.abs(den_t) >= DENOMINATOR_GUARD)
    bad_s[0] = not np.isfinite(q_s[0])  # x s0 + 3x vanishes at 0 by construction
    q_s = np.where(bad_s, np.nan, q_s)
    q_t = np.where(bad_t, np.nan, q_t)
    if merge == "s":
        q, flagged = q_s, bad_s
    elif merge == "tau":
        q, flagged = q_t, bad_t
    else:
        w = _blend_weights(xe)
        with np.errstate(invalid="ignore"):
            q = np.where(w == 1.0, q_s, np.where(w == 0.0, q_t, w * q_s + (1.0 - w) * q_t))
        flagged = ((w > 0) & bad_s) | ((w < 1) & bad_t)
    sol.q_from_s, sol.q_from_tau = q_s[1:-1], q_t[1:-1]
    sol.q_smooth = np.where(flagged, np.nan, q)[1:-1]
    sol.q_ends = (float(q[0]), float(q[-1]))
    sol.flagged = flagged[1:-1] | (sol.rank_deficient if sol.rank_deficient is not None else False)
    sol.q_final = np.where(sol.flagged, np.nan, sol.q_smooth)
    sol.trusted = trusted
    sol.merge = merge
    return sol


def _dn_roots(report: CompletionReport) -> np.ndarray:
    lam = report.full_spectrum().eigenvalues
    if np.any(lam <= 0):
        raise InputError("inverse solver needs positive DN eigenvalues")
    return np.sqrt(lam)


def invert_two_spectra(dd: Spectrum, dn: Spectrum, N: int | None = None,
                       Nc: int = 9, complete_to: int = 100, M: int = 200,
                       margin: float = DEFAULT_MARGIN, merge: str = "split",
                       regularize: bool = False) -> InverseSolution:
    """Recover q from the first eigenvalues of the DD and DN spectra.

    ``N`` caps the number of NSBF coefficients at pi used in the completion
    step; each side also respects its own bound (N1 - 1 for DD, N2 - 1 for
    DN).  The DN spectrum is completed to ``complete_to`` eigenvalues in total.
    """
    if dd.bc.kind != "DD" or dn.bc.kind != "DN":
        raise InputError("invert_two_spectra expects a DD and a DN spectrum")
    if len(dd) < 2 or len(dn) < 2:
        raise InputError("each spectrum needs at least two eigenvalues")
    n_dd = len(dd) - 1
    n_dn = max(len(dn) - 2, 0)
    if N is not None:
        if N < 1:
            raise InputError("N must be at least 1")
        n_dd, n_dn = min(N, n_dd), min(N, n_dn)
    dd_rep = complete_dd(dd, n_dd, len(dd), regularize)
    dn_rep = complete_dn(dn, n_dn, max(complete_to - 1, len(dn) - 1), regularize)
    rhos = _dn_roots(dn_rep)
    betas = compute_betas(rhos, dd_rep.approximant)
    grid = make_grid(M, margin)
    s_tab, t_tab, deficient, cond = solve_coefficient_system(rhos, betas, grid, Nc, True)
    sol = InverseSolution(grid, Nc, s_tab, t_tab, betas, rhos, rank_deficient=deficient,
                          condition=cond, merge=merge, reports={"dd": dd_rep, "dn": dn_rep})
    return recover_potential(sol)


def roundtrip_spectra(sol: InverseSolution, dd: Spectrum, dn: Spectrum):
    """Spectra of the recovered potential at the same indices as ``dd`` and ``dn``."""
    q = sol.potential_model()
    return [eigenvalues(q, spec.bc, len(spec), spec.start) for spec in (dd, dn)]


def roundtrip_residuals(sol: InverseSolution, dd: Spectrum, dn: Spectrum) -> np.ndarray:
    """|lambda(recovered q) - lambda_given| / |lambda_given|, DD entries then DN."""
    got = roundtrip_spectra(sol, dd, dn)
    return np.concatenate([np.abs(g.eigenvalues - s.eigenvalues) / np.abs(s.eigenvalues)
                           for g, s in zip(got, (dd, dn))])
