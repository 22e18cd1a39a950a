import functools
import warnings

import numpy as np
import pytest
from scipy import integrate, optimize

from nsbf_spectra import BoundaryCondition, eigenvalues, potential

DD = BoundaryCondition.dd()
DN = BoundaryCondition.dn()

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def spectrum(name: str, kind: str, count: int, h: float = 0.0, H: float = 0.0):
    """Cached forward spectra shared between test modules."""
    bc = {"DD": DD, "DN": DN}.get(kind) or BoundaryCondition.robin(h, H)
    return eigenvalues(potential(name), bc, count)


def shoot(q, lam, init=(0.0, 1.0), x_end=np.pi):
    """(y, y') at x_end for -y'' + q y = lam y, via scipy's adaptive DOP853."""
    sol = integrate.solve_ivp(lambda x, u: [u[1], (q(np.array(x)) - lam) * u[0]],
                              (0.0, x_end), list(init), method="DOP853",
                              rtol=1e-13, atol=1e-14)
    return sol.y[0, -1], sol.y[1, -1]


def shooting_eigenvalue(q, kind, lo, hi):
    """Independent eigenvalue in [lo, hi] from plain shooting (DD: y(pi)=0, DN: y'(pi)=0)."""
    col = 0 if kind == "DD" else 1
    return optimize.brentq(lambda lam: shoot(q, lam)[col], lo, hi, xtol=1e-13, rtol=1e-15)


def pytest_configure(config):
    warnings.filterwarnings("ignore", category=RuntimeWarning, module="nsbf_spectra")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    """record(n, ok, detail) stores the outcome and prints one line for criterion n."""
    def _record(n, ok, detail):
        ACCEPTANCE[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return bool(ok)
    return _record
