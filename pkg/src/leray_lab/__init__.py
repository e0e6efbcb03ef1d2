"""leray-lab: periodic-box numerical laboratory for Navier-Stokes
regularity diagnostics.

Layers, bottom up: spectral fields and operators on the periodic box,
exact norm machinery (all-tuples derivative norms with the Plancherel
fast path), a radial quadrature route for true R^n integrals, the
inequality laboratory with its sharp constants, the derived
regularity-time bounds, and an instrumented pseudo-spectral solver.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    bound_constant,
    classical_bound,
    compute_bound_report,
    regularity_time_bound,
    smallness_criterion,
)
from .fields import ScalarField, VectorField, transform
from .grid import Grid, make_grid
from .inequalities import (
    InequalityReport,
    embedding_4d_check,
    first_interp_check,
    gn_ratio,
    interpolation_check,
    lemma21_check,
    optimal_constants,
    product_estimate_4d_check,
    trilinear_lhs,
)
from .norms import NormRequest, dm_lq_norm, linf_dm_norm, lq_norm
from .operators import derivative, heat_semigroup, leray_project, nonlinear_term
from .radial import RadialFunction, gaussian, radial_lq_norm, sech2_extremal
from .solver import (
    DiagnosticsSeries,
    InitialCondition,
    SnapshotPlan,
    SolverConfig,
    TrajectoryStore,
    decay_diagnostics,
    duhamel_residual,
    energy_balance_residual,
    initialize,
    monotone_onset,
    simulate,
    step,
)

__all__ = [
    "__version__",
    "Grid",
    "make_grid",
    "VectorField",
    "ScalarField",
    "transform",
    "leray_project",
    "derivative",
    "heat_semigroup",
    "nonlinear_term",
    "NormRequest",
    "lq_norm",
    "dm_lq_norm",
    "linf_dm_norm",
    "RadialFunction",
    "sech2_extremal",
    "gaussian",
    "radial_lq_norm",
    "InequalityReport",
    "gn_ratio",
    "optimal_constants",
    "trilinear_lhs",
    "lemma21_check",
    "interpolation_check",
    "first_interp_check",
    "embedding_4d_check",
    "product_estimate_4d_check",
    "BoundReport",
    "bound_constant",
    "regularity_time_bound",
    "classical_bound",
    "smallness_criterion",
    "compute_bound_report",
    "SolverConfig",
    "InitialCondition",
    "SnapshotPlan",
    "DiagnosticsSeries",
    "TrajectoryStore",
    "initialize",
    "step",
    "simulate",
    "energy_balance_residual",
    "monotone_onset",
    "duhamel_residual",
    "decay_diagnostics",
]
