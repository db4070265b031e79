"""Three-species Stefan-Maxwell transport-reaction solver.

Explicit upwind discretisation of a weakly ionised hydrogen mixture with
closed-form flux inversion per node, advanced by noniterative (sequential
and Strang-type) and iterative (Picard) operator-splitting schemes, plus
the verification harness comparing them.
"""

from ._backend import BACKEND
from .model import (
    MixtureParams,
    ReactionMatrix,
    Scenario,
    Scheme,
    SpeciesField,
    FluxField,
    Profile,
    arrhenius_rates,
    build_initial,
    reaction_matrix_example,
    hydrogen_mixture,
    duncan_toor_uphill_mixture,
    duncan_toor_asymptotic_mixture,
    fickian_mixture,
)
from .discretization import (
    Grid1D,
    UpwindOperator,
    Direction,
    apply_upwind,
    cfl_max_dt,
    cfl_grid_pairs,
    coarse_grid_map,
)
from .stefan_maxwell import FluxSolveInput, invert_flux_node, compute_fluxes
from .steppers import (
    ReactionEulerCoeffs,
    diffusion_step,
    reaction_step_euler,
    reaction_step_exact,
    matrix_exp_3x3,
)
from .splitting import (
    Trajectory,
    run_pure_diffusion,
    run_ab,
    run_aba_frozen,
    run_aba_updated,
    run_picard_reaction,
    run_picard_nested,
    run_scenario,
)
from .analysis import (
    ErrorReport,
    compute_error_report,
    sigma_sq,
    err_at_point,
    err_time_space,
    observed_order,
    uphill_region,
    splitting_order_study,
)
from .errors import CFLViolationError, FluxSingularityError, ConfigError

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "MixtureParams",
    "ReactionMatrix",
    "Scenario",
    "Scheme",
    "SpeciesField",
    "FluxField",
    "Profile",
    "arrhenius_rates",
    "build_initial",
    "reaction_matrix_example",
    "hydrogen_mixture",
    "duncan_toor_uphill_mixture",
    "duncan_toor_asymptotic_mixture",
    "fickian_mixture",
    "Grid1D",
    "UpwindOperator",
    "Direction",
    "apply_upwind",
    "cfl_max_dt",
    "cfl_grid_pairs",
    "coarse_grid_map",
    "FluxSolveInput",
    "invert_flux_node",
    "compute_fluxes",
    "ReactionEulerCoeffs",
    "diffusion_step",
    "reaction_step_euler",
    "reaction_step_exact",
    "matrix_exp_3x3",
    "Trajectory",
    "run_pure_diffusion",
    "run_ab",
    "run_aba_frozen",
    "run_aba_updated",
    "run_picard_reaction",
    "run_picard_nested",
    "run_scenario",
    "ErrorReport",
    "compute_error_report",
    "sigma_sq",
    "err_at_point",
    "err_time_space",
    "observed_order",
    "uphill_region",
    "splitting_order_study",
    "CFLViolationError",
    "FluxSingularityError",
    "ConfigError",
]
