"""Boundary integral solvers for the two-dimensional Helmholtz equation."""

from .bvp import (
    BvpSpec,
    Solution,
    compat_project,
    greens_identity_check,
    incident_data,
    obstruction_basis,
    solve,
)
from .geometry import (
    Curve,
    Domain,
    QuadGrid,
    annulus,
    build_grid,
    domain_from_dict,
    load_domain,
    point_location,
    unit_disk,
)
from .nystrom import assemble_T, assemble_V, assemble_W, assemble_Wt
from .potentials import Density, double_layer_field, radiation_residual, single_layer_field
from .specfun import Wavenumber, bessel_j, bessel_y, fundamental_solution, hankel1
from .spectra import eigen_scan, eigenfunction_from_density, holmgren_injectivity_check, xi_decompose

__version__ = "0.1.0"

__all__ = [
    "BvpSpec", "Curve", "Density", "Domain", "QuadGrid", "Solution", "Wavenumber",
    "annulus", "assemble_T", "assemble_V", "assemble_W", "assemble_Wt", "bessel_j", "bessel_y",
    "build_grid", "compat_project", "domain_from_dict", "double_layer_field", "eigen_scan",
    "eigenfunction_from_density", "fundamental_solution", "greens_identity_check", "hankel1",
    "holmgren_injectivity_check", "incident_data", "load_domain", "obstruction_basis", "point_location",
    "radiation_residual", "single_layer_field", "solve", "unit_disk", "xi_decompose",
]
