"""Nonlocal two-point calculus and sparse-flux optimization.

Discretizes the two-point gradient/divergence pair with an interaction
horizon on the unit interval or square, provides the mixed-exponent
norm toolbox, and solves the vanishing-material flux problems (mixed
basis pursuit with or without antisymmetric fluxes, their duals,
Tikhonov regularizations, and the capped design problem) with one
primal-dual engine.
"""

from ._kernels import BACKEND
from .design import (DegenerateInputError, DeltaSweepResult, DesignBudget,
                     compliance_value, delta_sweep, local_reference_1d,
                     optimal_conductivity_unbounded, solve_design_gamma,
                     water_filling_conductivity)
from .fields import (FieldError, ScalarField, Support, Symmetry,
                     TwoPointField, VectorField)
from .geometry import (ConfigurationError, Grid, Kernel, build_grid,
                       build_full_interaction_grid, build_kernel)
from .norms import (RowNormProfile, norm_2, norm_12, norm_inf2, prox_norm12,
                    project_ball_12, project_ball_inf2, row_norm_profile)
from .operators import (NumericalError, flux_recovery, nonlocal_divergence,
                        nonlocal_gradient, operator_norm_estimate,
                        symmetry_project)
from .solvers import (SolveReport, SolverConfig, dual_norm_antisym,
                      dual_norm_free, solve_basis_pursuit,
                      solve_dual_temperature, solve_tikhonov)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    "ConfigurationError", "FieldError", "NumericalError",
    "DegenerateInputError",
    "Grid", "Kernel", "build_grid", "build_kernel",
    "build_full_interaction_grid",
    "ScalarField", "TwoPointField", "VectorField", "Support", "Symmetry",
    "RowNormProfile", "row_norm_profile", "norm_12", "norm_inf2", "norm_2",
    "prox_norm12", "project_ball_12", "project_ball_inf2",
    "nonlocal_gradient", "nonlocal_divergence", "flux_recovery",
    "symmetry_project", "operator_norm_estimate",
    "SolverConfig", "SolveReport", "solve_basis_pursuit", "solve_tikhonov",
    "solve_dual_temperature", "dual_norm_antisym", "dual_norm_free",
    "DesignBudget", "optimal_conductivity_unbounded",
    "water_filling_conductivity", "compliance_value", "solve_design_gamma",
    "local_reference_1d", "delta_sweep", "DeltaSweepResult",
]
