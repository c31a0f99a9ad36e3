"""Heat-kernel Beurling-Ahlfors extension of curves driven by ``u``.

The package builds ``gamma_u``, its extension ``F_u`` to both half-planes,
the complex dilatation ``mu_u`` and the function-space diagnostics around
them. The hot loops run in a compiled core when it is built and in numpy
otherwise; ``heatba.BACKEND`` names the one in use.
"""
from ._backend import NAME as BACKEND
from .circle import (DiskField, circle_besov_norm, circle_bmo_norm, disk_p_norm, lift,
                     project_disk)
from .diagnostics import (CarlesonProfile, DiagnosticsReport, bilipschitz_ratio, carleson_profile,
                          gateaux_check, hyperbolic_p_norm, maximal_dilatation, sup_norm,
                          vanishing_profile)
from .errors import DomainError, HeatBAError, NumericalGuardError
from .extension import (Curve, Grid, HalfPlaneField, extend, gamma, mu_at, mu_field, partials)
from .funcspace import (IntervalFamily, NormConstants, SampledFunction, a2_constant,
                        a_infty_constant, besov_norm, bmo_norm, doubling_constant,
                        exp_oscillation, in_neighborhood, mollifier, mollify,
                        neighborhood_distance, truncate, vmo_profile)
from .kernels import KernelSet, alpha, beta, convolve_at, convolve_grid, phi, phi2, psi

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CarlesonProfile", "Curve", "DiagnosticsReport", "DiskField", "DomainError",
    "Grid", "HalfPlaneField", "HeatBAError", "IntervalFamily", "KernelSet", "NormConstants",
    "NumericalGuardError", "SampledFunction", "a2_constant", "a_infty_constant", "alpha",
    "besov_norm", "beta", "bilipschitz_ratio", "bmo_norm", "carleson_profile",
    "circle_besov_norm", "circle_bmo_norm", "convolve_at", "convolve_grid", "disk_p_norm",
    "doubling_constant", "exp_oscillation", "extend", "gamma", "gateaux_check",
    "hyperbolic_p_norm", "in_neighborhood", "lift", "maximal_dilatation", "mollifier", "mollify",
    "mu_at", "mu_field", "neighborhood_distance", "partials", "phi", "phi2", "project_disk", "psi",
    "sup_norm", "truncate", "vanishing_profile", "vmo_profile",
]
