"""
Robin conditions without knowing h and H
========================================

y'(0) = h y(0) and y'(pi) + H y(pi) = 0.  The completion step never uses the
constants: they only enter the reference computation below.
"""
import math

import numpy as np

from nsbf_spectra import BoundaryCondition, Spectrum, complete_robin, eigenvalues, omega_of, potential

q = potential("exp")
h, H = 1.0, 2.0
bc = BoundaryCondition.robin(h, H)
ref = eigenvalues(q, bc, 101).eigenvalues

rep = complete_robin(Spectrum(bc, ref[:8]), k_max=100)
k = rep.completed_indices
err = np.abs(np.sqrt(rep.completed_eigenvalues) - np.sqrt(ref[k]))
for kk in [8, 15, 30, 60, 100]:
    print(f"k = {kk:3d}   error {err[kk - k[0]]:.2e}")

###############################################################################
# The same list with made-up constants gives the same completion.

other = complete_robin(Spectrum(BoundaryCondition.robin(-3.0, 7.0), ref[:8]), k_max=100)
print("identical:", np.array_equal(other.completed_eigenvalues, rep.completed_eigenvalues))

###############################################################################
# The leading coefficient estimates h + H + omega of the shifted problem.

target = h + H + omega_of(q) - 0.5 * math.pi * ref[0]
print("omega bar:", rep.omega_estimate, "expected about", target)
