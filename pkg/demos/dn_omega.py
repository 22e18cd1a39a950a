"""
The mean of the potential from Dirichlet-Neumann data
=====================================================

For y(0) = y'(pi) = 0 the completion also returns an estimate of
omega = (1/2) * integral of q.  With q = 1/(x + 0.1)^2 the exact value is
known in closed form.
"""
from nsbf_spectra import BoundaryCondition, Spectrum, complete_dn, eigenvalues, omega_of, potential

q = potential("paine2")
dn = BoundaryCondition.dn()
ev = eigenvalues(q, dn, 20).eigenvalues
print("exact omega:", omega_of(q))

for n in [3, 5, 8, 10, 15, 20]:
    rep = complete_dn(Spectrum(dn, ev[:n]))
    print(f"{n:2d} given   omega estimate {rep.omega_estimate:8.4f}"
          f"   error {rep.omega_estimate - omega_of(q):+.4f}")
