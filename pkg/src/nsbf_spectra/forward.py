"""Reference direct solver for -y'' + q(x) y = lambda y on [0, pi].

Everything downstream is checked against this module, so it is built for
accuracy first.  Solutions are tracked in a scaled Prüfer form

    y = R sin(theta),  y' = s R cos(theta),  theta = s x + phi,

with s = sqrt(max(lambda, 1)).  Subtracting the linear phase s x leaves a slowly
varying phi that stays O(1/s), so the eigenvalue condition on theta(pi) is
evaluated without the roundoff of accumulating a large angle step by step.
The ODE for (phi, log R) is integrated with the 8th order Dormand-Prince
tableau on a fixed mesh that is refined in the oscillation scale of lambda and
in the local variation of q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit
from numpy.polynomial import Chebyshev
from scipy import integrate, optimize
from scipy.integrate._ivp.dop853_coefficients import A as _DOP_A
from scipy.integrate._ivp.dop853_coefficients import B as _DOP_B
from scipy.integrate._ivp.dop853_coefficients import C as _DOP_C
from scipy.integrate._ivp.dop853_coefficients import N_STAGES
from scipy.interpolate import CubicSpline

from .errors import InputError, NumericalError

PI = math.pi

_A = np.ascontiguousarray(_DOP_A[:N_STAGES, :N_STAGES])
_B = np.ascontiguousarray(_DOP_B)
_C = np.ascontiguousarray(_DOP_C[:N_STAGES])

# steps per radian of local oscillation; 0.15 keeps theta(pi) good to ~1e-13
STEP_PER_RADIAN = 0.15
# relative eigenvalue accuracy the mesh rule is tuned for (checked in the tests)
TARGET_ACCURACY = 1e-10
_MIN_STEPS_PER_SEGMENT = 4


# --------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class PotentialModel:
    """A real potential on [0, pi], evaluable vectorised.

    ``breakpoints`` are interior points where q or its derivatives jump; the
    integration mesh always contains them.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    breakpoints: tuple = ()
    omega_exact: float | None = field(default=None, repr=False)
    table: tuple | None = field(default=None, repr=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.func(x), dtype=float), x.shape).copy()

    def shifted(self, c: float) -> "PotentialModel":
        """q + c."""
        f = self.func
        om = None if self.omega_exact is None else self.omega_exact + 0.5 * PI * c
        return PotentialModel(f"{self.name}{c:+.17g}", lambda x: f(x) + c,
                              self.breakpoints, om)

    def reflected(self) -> "PotentialModel":
        """x -> q(pi - x)."""
        f = self.func
        bp = tuple(sorted(PI - b for b in self.breakpoints))
        return PotentialModel(f"{self.name}~reflected", lambda x: f(PI - x), bp,
                              self.omega_exact)

    @classmethod
    def from_table(cls, x: Sequence[float], q: Sequence[float], name: str = "table"):
        """Cubic interpolant through (x_i, q_i), constant beyond the end nodes."""
        x = np.asarray(x, dtype=float)
        q = np.asarray(q, dtype=float)
        if x.ndim != 1 or x.shape != q.shape or x.size < 2:
            raise InputError("potential table needs matching 1-D x and q with >= 2 points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(q))):
            raise InputError("potential table contains non-finite values")
        if np.any(np.diff(x) <= 0):
            raise InputError("potential table x must be strictly increasing")
        if x[0] < -1e-12 or x[-1] > PI + 1e-12:
            raise InputError("potential table x must lie within [0, pi]")
        spline = CubicSpline(x, q) if x.size >= 4 else None
        lo, hi = x[0], x[-1]

        def f(t):
            t = np.asarray(t, dtype=float)
            tc = np.clip(t, lo, hi)
            return spline(tc) if spline is not None else np.interp(tc, x, q)

        bp = tuple(float(v) for v in x if 0.0 < v < PI)
        return cls(name, f, bp, None, (x.copy(), q.copy()))


def _builtin(name: str, c: float = 0.0) -> PotentialModel:
    if name == "zero":
        return PotentialModel("zero", lambda x: np.zeros_like(x), (), 0.0)
    if name == "const":
        return PotentialModel(f"const({c:g})", lambda x: np.full_like(x, c), (), 0.5 * PI * c)
    if name == "exp":
        return PotentialModel("exp", np.exp, (), 0.5 * (math.exp(PI) - 1.0))
    if name == "paine2":
        return PotentialModel("paine2", lambda x: 1.0 / (x + 0.1) ** 2, (),
                              0.5 * (10.0 - 1.0 / (PI + 0.1)))
    if name == "abs1":
        integral = 0.5 + 0.5 * (PI - 1.0) ** 2 + PI
        return PotentialModel("abs1", lambda x: np.abs(x - 1.0) + 1.0, (1.0,), 0.5 * integral)
    raise InputError(f"unknown potential {name!r}")


BUILTIN_NAMES = ("zero", "const", "exp", "paine2", "abs1")


def potential(spec) -> PotentialModel:
    """Builtin by name (``"exp"``, ``"const(2.5)"``, ...) or a PotentialModel."""
    if isinstance(spec, PotentialModel):
        return spec
    spec = str(spec).strip()
    if spec.startswith("const(") and spec.endswith(")"):
        try:
            c = float(spec[6:-1])
        except ValueError:
            raise InputError(f"bad constant in {spec!r}") from None
        return _builtin("const", c)
    return _builtin(spec)


def omega_of(q) -> float:
    """Half the integral of q over [0, pi]."""
    q = potential(q)
    if q.omega_exact is not None:
        return float(q.omega_exact)
    if q.table is not None:
        x, v = q.table
        total = 0.0
        if x.size >= 4:
            total = float(CubicSpline(x, v).integrate(x[0], x[-1]))
        else:
            total = float(np.trapezoid(v, x))
        total += v[0] * x[0] + v[-1] * (PI - x[-1])
        return 0.5 * total
    pts = [0.0, *q.breakpoints, PI]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(lambda t: float(q(t)), a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return 0.5 * total


# --------------------------------------------------------------------------
# boundary conditions and spectra


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    h: float = 0.0
    H: float = 0.0

    def __post_init__(self):
        if self.kind not in ("DD", "DN", "Robin"):
            raise InputError(f"unknown boundary condition {self.kind!r}")
        if not (math.isfinite(self.h) and math.isfinite(self.H)):
            raise InputError("Robin constants must be finite")

    @classmethod
    def dd(cls):
        return cls("DD")

    @classmethod
    def dn(cls):
        return cls("DN")

    @classmethod
    def robin(cls, h: float, H: float):
        return cls("Robin", float(h), float(H))

    @property
    def index_offset(self) -> int:
        return 1 if self.kind == "DD" else 0


@dataclass(frozen=True)
class Spectrum:
    """Consecutive eigenvalues lambda_start, lambda_{start+1}, ...

    ``start`` defaults to the natural first index of the problem (1 for DD,
    0 otherwise).
    """

    bc: BoundaryCondition
    eigenvalues: np.ndarray
    start: int | None = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float).copy()
        ev.flags.writeable = False
        object.__setattr__(self, "eigenvalues", ev)
        if self.start is None:
            object.__setattr__(self, "start", self.bc.index_offset)
        if ev.ndim != 1 or ev.size < 1:
            raise InputError("a spectrum needs at least one eigenvalue")
        if not np.all(np.isfinite(ev)):
            raise InputError("eigenvalues must be finite")
        if np.any(np.diff(ev) <= 0):
            raise InputError("eigenvalues must be strictly increasing (no duplicates)")

    @property
    def index_offset(self) -> int:
        return self.bc.index_offset

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + self.eigenvalues.size)

    @property
    def roots(self) -> np.ndarray:
        """Square roots of the eigenvalues (NaN where negative)."""
        with np.errstate(invalid="ignore"):
            return np.sqrt(self.eigenvalues)

    def __len__(self):
        return self.eigenvalues.size


# --------------------------------------------------------------------------
# integration kernel


@njit(cache=True)
def _sweep(nodes, qs, lam, s, phi0, lnr0, A, B, C, record, phi_out, lnr_out):
    n_steps = nodes.size - 1
    ns = B.size
    kphi = np.empty(ns)
    klnr = np.empty(ns)
    phi = phi0
    lnr = lnr0
    inv_s = 1.0 / s
    if record:
        phi_out[0] = phi
        lnr_out[0] = lnr
    for i in range(n_steps):
        x = nodes[i]
        h = nodes[i + 1] - x
        for k in range(ns):
            dphi = 0.0
            for j in range(k):
                dphi += A[k, j] * kphi[j]
            ph = phi + h * dphi
            th = s * (x + C[k] * h) + ph
            sn = math.sin(th)
            cs = math.cos(th)
            g = (lam - qs[i, k] - s * s) * inv_s
            kphi[k] = g * sn * sn
            klnr[k] = -g * sn * cs
        dphi = 0.0
        dlnr = 0.0
        for k in range(ns):
            dphi += B[k] * kphi[k]
            dlnr += B[k] * klnr[k]
        phi += h * dphi
        lnr += h * dlnr
        if record:
            phi_out[i + 1] = phi
            lnr_out[i + 1] = lnr
    return phi, lnr


_SEGMENT_CACHE: dict = {}


def _segments(q: PotentialModel):
    """Base partition of [0, pi] on which q is resolved by a degree-12 polynomial.

    Returns (edges, qmax) with qmax the max |q| sampled on each segment.
    """
    key = id(q)
    hit = _SEGMENT_CACHE.get(key)
    if hit is not None and hit[0] is q:
        return hit[1]
    pts = sorted({0.0, PI, *(b for b in q.breakpoints if 0.0 < b < PI)})
    edges = [pts[0]]
    qmax = []
    stack = list(zip(pts[:-1], pts[1:]))[::-1]
    while stack:
        a, b = stack.pop()
        # nudge inward so one-sided limits at breakpoints are used
        eps = 1e-12 * (b - a)
        try:
            cheb = Chebyshev.interpolate(q, 12, domain=[a + eps, b - eps])
            t = np.linspace(a + eps, b - eps, 33)
            vals = q(t)
            err = np.max(np.abs(cheb(t) - vals))
            scale = 1.0 + np.max(np.abs(vals))
        except (FloatingPointError, ValueError):
            err, scale, vals = np.inf, 1.0, np.array([0.0])
        if err <= 1e-10 * scale or (b - a) < 1e-3:
            edges.append(b)
            qmax.append(float(np.max(np.abs(vals))))
        else:
            m = 0.5 * (a + b)
            stack.append((m, b))
            stack.append((a, m))
    result = (np.array(edges), np.array(qmax))
    _SEGMENT_CACHE[key] = (q, result)
    if len(_SEGMENT_CACHE) > 256:
        _SEGMENT_CACHE.clear()
    return result


def _mesh(q: PotentialModel, lam: float, extra=None):
    edges, qmax = _segments(q)
    if extra is not None and len(extra):
        extra = np.asarray(extra, dtype=float)
        merged = np.unique(np.concatenate([edges, extra[(extra > 0) & (extra < PI)]]))
        idx = np.clip(np.searchsorted(edges, merged[:-1], side="right") - 1, 0, qmax.size - 1)
        edges, qmax = merged, qmax[idx]
    lengths = np.diff(edges)
    s = _scale(lam)
    # phase speed s plus the rate of the phi equation, |lam - q - s^2| / s
    kappa = np.maximum(s, (abs(lam - s * s) + qmax) / s)
    counts = np.maximum(np.ceil(lengths * kappa / STEP_PER_RADIAN).astype(int),
                        _MIN_STEPS_PER_SEGMENT)
    parts = [np.linspace(a, b, n + 1)[:-1] for a, b, n in zip(edges[:-1], edges[1:], counts)]
    return np.concatenate(parts + [np.array([PI])])


def _scale(lam: float) -> float:
    return math.sqrt(max(lam, 1.0))


def _run(q: PotentialModel, lam: float, theta0: float, lnr0: float, extra=None, record=False):
    nodes = _mesh(q, lam, extra)
    h = np.diff(nodes)
    stage_x = nodes[:-1, None] + h[:, None] * _C[None, :]
    qs = np.ascontiguousarray(q(stage_x))
    if not np.all(np.isfinite(qs)):
        raise NumericalError(f"potential {q.name} is not finite on [0, pi]")
    s = _scale(lam)
    n = nodes.size if record else 1
    phi_out = np.empty(n)
    lnr_out = np.empty(n)
    phi, lnr = _sweep(nodes, qs, float(lam), s, theta0, lnr0, _A, _B, _C, record,
                      phi_out, lnr_out)
    if not (math.isfinite(phi) and math.isfinite(lnr)):
        raise NumericalError(f"integration failed for {q.name} at lambda={lam!r}")
    return nodes, s, phi, lnr, phi_out, lnr_out


def _initial_polar(y0: float, dy0: float, s: float):
    if y0 == 0.0 and dy0 == 0.0:
        raise InputError("initial data must not vanish identically")
    theta0 = math.atan2(s * y0, dy0)
    lnr0 = math.log(math.hypot(y0, dy0 / s))
    return theta0, lnr0


def _lam_from(rho, lam):
    if lam is not None:
        return float(lam)
    r = complex(rho)
    if r.real != 0.0 and r.imag != 0.0:
        raise InputError("rho must be real or purely imaginary")
    return float((r * r).real)


def integrate_solution(q, rho=None, init=(0.0, 1.0), *, lam=None):
    """(y(pi), y'(pi)) for the solution with (y(0), y'(0)) = init and lambda = rho^2.

    ``rho`` may be real or purely imaginary (``1j * t``); alternatively pass
    ``lam`` directly.
    """
    q = potential(q)
    lam = _lam_from(rho, lam)
    s = _scale(lam)
    theta0, lnr0 = _initial_polar(float(init[0]), float(init[1]), s)
    _, s, phi, lnr, _, _ = _run(q, lam, theta0, lnr0)
    theta = s * PI + phi
    r = math.exp(lnr)
    return r * math.sin(theta), s * r * math.cos(theta)


def solution_values(q, lam: float, xs, init=(0.0, 1.0)):
    """y and y' at the points xs (inside [0, pi]) for lambda = lam."""
    q = potential(q)
    xs = np.asarray(xs, dtype=float)
    if np.any((xs < 0) | (xs > PI)):
        raise InputError("evaluation points must lie in [0, pi]")
    s = _scale(lam)
    theta0, lnr0 = _initial_polar(float(init[0]), float(init[1]), s)
    nodes, s, _, _, phi, lnr = _run(q, lam, theta0, lnr0, extra=xs.ravel(), record=True)
    pos = np.searchsorted(nodes, xs.ravel())
    pos = np.clip(pos, 0, nodes.size - 1)
    theta = s * nodes[pos] + phi[pos]
    r = np.exp(lnr[pos])
    y = (r * np.sin(theta)).reshape(xs.shape)
    dy = (s * r * np.cos(theta)).reshape(xs.shape)
    return y, dy


# --------------------------------------------------------------------------
# eigenvalues


def _target_angles(bc: BoundaryCondition, s: float):
    """(theta(0), theta*) with the n-th eigenvalue at theta(pi) = theta* + n pi."""
    if bc.kind == "DD":
        return 0.0, PI
    if bc.kind == "DN":
        return 0.0, 0.5 * PI
    return math.atan2(s, bc.h), math.atan2(s, -bc.H)


def _mismatch(q, bc, lam, n0):
    s = _scale(lam)
    theta0, theta_star = _target_angles(bc, s)
    _, s, phi, _, _, _ = _run(q, lam, theta0, 0.0)
    # theta(pi) - theta* - n0 pi with the linear part taken out analytically
    return (s * PI - (n0 * PI + theta_star)) + phi


def _asymptotic_guess(q, bc, n0):
    w = 2.0 * omega_of(q) / PI
    if bc.kind == "DD":
        return (n0 + 1.0) ** 2 + w
    if bc.kind == "DN":
        return (n0 + 0.5) ** 2 + w
    return n0 * n0 + w + 2.0 * (bc.h + bc.H) / PI


def _eigenvalue(q, bc, n0, lower=None):
    f = lambda lam: _mismatch(q, bc, lam, n0)
    guess = _asymptotic_guess(q, bc, n0)
    width = max(2.0, 2.0 * (n0 + 1))
    if lower is not None and f(lower) < 0:
        a = lower
    else:
        a = guess - width
        for _ in range(80):
            if f(a) < 0:
                break
            a -= width
            width *= 2
        else:
            raise NumericalError(f"could not bracket eigenvalue index {n0 + bc.index_offset} from below")
    b = max(guess + width, a + width)
    width = max(2.0, 2.0 * (n0 + 1))
    for _ in range(80):
        fb = f(b)
        if fb > 0:
            break
        if fb < 0:
            a = b
        b += width
        width *= 2
    else:
        raise NumericalError(f"could not bracket eigenvalue index {n0 + bc.index_offset} from above")
    xtol = 1e-15 * max(1.0, abs(a), abs(b))
    lam, info = optimize.brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps,
                                maxiter=200, full_output=True)
    if not info.converged:
        raise NumericalError(f"eigenvalue index {n0 + bc.index_offset} did not converge")
    return lam


def eigenvalues(q, bc: BoundaryCondition, count: int, start: int | None = None) -> Spectrum:
    """The first ``count`` eigenvalues (or ``count`` of them from index ``start``).

    Indices follow the problem's convention: DD eigenvalues are numbered from 1,
    DN and Robin from 0.
    """
    q = potential(q)
    if count < 1:
        raise InputError("count must be positive")
    if start is None:
        start = bc.index_offset
    if start < bc.index_offset:
        raise InputError(f"{bc.kind} eigenvalues start at index {bc.index_offset}")
    out = []
    prev = None
    for k in range(start, start + count):
        lam = _eigenvalue(q, bc, k - bc.index_offset, lower=prev)
        out.append(lam)
        prev = lam
    return Spectrum(bc, np.array(out), start)
