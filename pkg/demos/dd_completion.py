"""
Completing a Dirichlet spectrum
===============================

Five eigenvalues of -y'' + e^x y = lambda y, y(0) = y(pi) = 0, are enough to
build a characteristic function whose zeros continue the spectrum.  Here we
compare those zeros with a direct shooting computation and with the classical
two-term asymptotics.
"""
import numpy as np

from nsbf_spectra import BoundaryCondition, Spectrum, complete_dd, eigenvalues, omega_of, potential
from nsbf_spectra.completion import asymptotic_dd

q = potential("exp")
dd = BoundaryCondition.dd()

# reference spectrum from the forward solver
ref = eigenvalues(q, dd, 300)
print("first eigenvalue:", ref.eigenvalues[0])

###############################################################################
# Five given values, four coefficients.

given = Spectrum(dd, ref.eigenvalues[:5])
rep = complete_dd(given, N=4, k_max=300)
print("coefficients:", np.round(rep.approximant.coeffs, 5))

k = rep.completed_indices
mu = np.sqrt(rep.completed_eigenvalues)
mu_ref = np.sqrt(ref.eigenvalues[k - 1])
err = np.abs(mu - mu_ref)
asym = np.abs(asymptotic_dd(k, omega_of(q)) - mu_ref)

for kk in [6, 10, 20, 40, 100, 200, 300]:
    i = kk - k[0]
    print(f"k = {kk:3d}   error {err[i]:.2e}   asymptotic {asym[i]:.2e}")

###############################################################################
# The error does not grow with the index.

print("max error, k in [6, 50]:   ", err[k <= 50].max())
print("max error, k in [200, 300]:", err[k >= 200].max())
