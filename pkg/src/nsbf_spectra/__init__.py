"""Sturm-Liouville spectra on [0, pi] through Neumann series of Bessel functions.

Forward eigenvalues, completion of a spectrum from a few of its eigenvalues,
and recovery of the potential from two spectra.
"""
from .bessel import modified_spherical_in_table, spherical_jn, spherical_jn_sequence, spherical_jn_table
from .completion import (CompletionReport, asymptotic_ck, asymptotic_dd, complete, complete_dd,
                         complete_dn, complete_robin)
from .errors import IllConditionedError, InputError, NumericalError
from .forward import (BoundaryCondition, PotentialModel, Spectrum, eigenvalues, integrate_solution,
                      omega_of, potential, solution_values)
from .inverse import (InverseSolution, compute_betas, invert_two_spectra, make_grid,
                      recover_potential, roundtrip_residuals, roundtrip_spectra,
                      solve_coefficient_system)
from .io import EigenvalueFile, PotentialFile
from .nsbf import CharacteristicApproximant, ZeroSearch, find_zeros

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "CharacteristicApproximant", "CompletionReport", "EigenvalueFile",
    "IllConditionedError", "InputError", "InverseSolution", "NumericalError", "PotentialFile",
    "PotentialModel", "Spectrum", "ZeroSearch", "asymptotic_ck", "asymptotic_dd", "complete",
    "complete_dd", "complete_dn", "complete_robin", "compute_betas", "eigenvalues",
    "find_zeros", "integrate_solution", "invert_two_spectra", "make_grid",
    "modified_spherical_in_table", "omega_of", "potential", "recover_potential",
    "roundtrip_residuals", "roundtrip_spectra", "solution_values", "solve_coefficient_system",
    "spherical_jn", "spherical_jn_sequence", "spherical_jn_table",
]
