"""
Recovering a potential from two short spectra
=============================================

Ten Dirichlet-Dirichlet and ten Dirichlet-Neumann eigenvalues of
q = 1/(x + 0.1)^2.  The Dirichlet-Neumann list is completed to 100 values,
a small linear system is solved at every grid point and q is read off the
first coefficients.
"""
import numpy as np

from nsbf_spectra import BoundaryCondition, Spectrum, eigenvalues, invert_two_spectra, potential
from nsbf_spectra.inverse import roundtrip_residuals

q = potential("paine2")
dd = Spectrum(BoundaryCondition.dd(), eigenvalues(q, BoundaryCondition.dd(), 10).eigenvalues)
dn = Spectrum(BoundaryCondition.dn(), eigenvalues(q, BoundaryCondition.dn(), 10).eigenvalues)

sol = invert_two_spectra(dd, dn, Nc=9, complete_to=100)
x, qr = sol.potential_table()

for xv in [0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]:
    i = np.argmin(np.abs(x - xv))
    print(f"x = {x[i]:.3f}   recovered {qr[i]:8.4f}   exact {q(x[i]):8.4f}")

###############################################################################
# The eigenvalues of the recovered potential against the data.

res = roundtrip_residuals(sol, dd, dn)
print("largest relative residual:", res.max())
print("grid points kept:", int(np.isfinite(sol.q_final).sum()), "of", sol.grid.size)
