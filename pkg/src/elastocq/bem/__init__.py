"""Galerkin boundary element operators and layer potentials."""

from .assembly import (AssemblyError, BoundaryOperatorSet, assemble_operators, hat_gradients,
                       pair_plan, surface_mass01, surface_mass11)
from .jumps import (JumpResiduals, OneSidedLimits, ProbeSet, ProbeSettings,
                    average_identities_test, jump_residuals, jump_test_double, jump_test_single,
                    one_sided_limits, probe_set, richardson)
from .plan import PairPlan, QuadratureSettings
from .potentials import (NearSurfaceWarning, PotentialQuadrature, gradient_double,
                         gradient_single, potential_double, potential_single,
                         traction_from_gradient)

__all__ = [
    "AssemblyError", "BoundaryOperatorSet", "assemble_operators", "hat_gradients", "pair_plan",
    "surface_mass01", "surface_mass11", "PairPlan", "QuadratureSettings", "NearSurfaceWarning",
    "PotentialQuadrature", "gradient_double", "gradient_single", "potential_double",
    "potential_single", "traction_from_gradient", "JumpResiduals", "OneSidedLimits", "ProbeSet",
    "ProbeSettings", "average_identities_test", "jump_residuals", "jump_test_double",
    "jump_test_single", "one_sided_limits", "probe_set", "richardson",
]
