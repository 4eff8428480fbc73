"""Solvers, merit functions, and benchmarks for general variational inequalities."""

from .auxiliary import (
    ControlledOperator,
    GapEvaluation,
    gap_N,
    regularized_gap,
    regularized_gap_gradient,
    solve_gap_descent,
    solve_three_step,
)
from .bench_cli import (
    ALGORITHMS,
    BenchResult,
    ProblemSpec,
    build_problem,
    emit_table,
    parse_config_file,
    run_suite,
)
from .convexity_lab import (
    CertReport,
    FunctionUnderTest,
    builtin_functions,
    check_exp_convex,
    check_gradient_char,
    check_hierarchy,
    check_hos_convex,
    check_parallelogram,
    default_t_grid,
    exp_convex_violation,
    exp_gradient_violation,
    gradient_char_violation,
    hierarchy_violation,
    hos_convex_violation,
    parallelogram_violation,
)
from .core import (
    ComplementarityGap,
    GviProblem,
    SolveConfig,
    SolveReport,
    TraceRecord,
    complementarity_gap,
    default_rho,
    default_start,
    estimate_lipschitz,
    is_solution,
    quasi_to_general,
    recover_iterate,
    residual,
    resolve_rho,
    wiener_hopf_residual,
)
from .equilibrium import (
    EquilibriumProblem,
    HigherOrderProblem,
    VarLikeProblem,
    diagonal_kernel_oracle,
    projection_aux_oracle,
    solve_eq_inertial,
    solve_eq_predictor_corrector,
    solve_higher_order,
    solve_varlike,
)
from .errors import (
    AssemblyError,
    CapabilityError,
    DivergenceError,
    GridError,
    GviError,
    InfeasibleSetError,
    InnerLoopError,
    LineSearchError,
    NumericDomainError,
    OracleContractError,
    ProblemSpecError,
    StallError,
    UnsupportedSetError,
)
from .obstacle_spline import (
    ObstacleProblem,
    SplineSystem,
    analytic_solution,
    assemble,
    benchmark_problem,
    complementarity_check,
    discrete_energy,
    max_error,
    solve_grid,
    spline_fit,
)
from .sets import (
    Box,
    ConvexSet,
    Halfspace,
    Hyperplane,
    IntersectionWithHyperplane,
    NonnegOrthant,
    Simplex,
    WholeSpace,
    contains,
    distance,
    project,
    project_intersection,
)
from .solvers import (
    DynamicalVariant,
    TwoStepScheme,
    solve_dynamical,
    solve_extragradient,
    solve_projection,
    solve_two_step,
)
from .wiener_hopf import (
    ArmijoResult,
    StepData,
    armijo_search,
    solve_double_projection_basic,
    solve_double_projection_optimal,
    solve_whe,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ArmijoResult",
    "AssemblyError",
    "BenchResult",
    "Box",
    "CapabilityError",
    "CertReport",
    "ComplementarityGap",
    "ControlledOperator",
    "ConvexSet",
    "DivergenceError",
    "DynamicalVariant",
    "EquilibriumProblem",
    "FunctionUnderTest",
    "GapEvaluation",
    "GridError",
    "GviError",
    "GviProblem",
    "Halfspace",
    "HigherOrderProblem",
    "Hyperplane",
    "InfeasibleSetError",
    "InnerLoopError",
    "IntersectionWithHyperplane",
    "LineSearchError",
    "NonnegOrthant",
    "NumericDomainError",
    "ObstacleProblem",
    "OracleContractError",
    "ProblemSpec",
    "ProblemSpecError",
    "Simplex",
    "SolveConfig",
    "SolveReport",
    "SplineSystem",
    "StallError",
    "StepData",
    "TraceRecord",
    "TwoStepScheme",
    "UnsupportedSetError",
    "VarLikeProblem",
    "WholeSpace",
    "analytic_solution",
    "armijo_search",
    "assemble",
    "benchmark_problem",
    "build_problem",
    "builtin_functions",
    "check_exp_convex",
    "check_gradient_char",
    "check_hierarchy",
    "check_hos_convex",
    "check_parallelogram",
    "complementarity_check",
    "complementarity_gap",
    "contains",
    "default_rho",
    "default_start",
    "default_t_grid",
    "diagonal_kernel_oracle",
    "discrete_energy",
    "distance",
    "emit_table",
    "estimate_lipschitz",
    "exp_convex_violation",
    "exp_gradient_violation",
    "gap_N",
    "gradient_char_violation",
    "hierarchy_violation",
    "hos_convex_violation",
    "is_solution",
    "max_error",
    "parallelogram_violation",
    "parse_config_file",
    "project",
    "project_intersection",
    "projection_aux_oracle",
    "quasi_to_general",
    "recover_iterate",
    "regularized_gap",
    "regularized_gap_gradient",
    "residual",
    "resolve_rho",
    "run_suite",
    "solve_double_projection_basic",
    "solve_double_projection_optimal",
    "solve_dynamical",
    "solve_eq_inertial",
    "solve_eq_predictor_corrector",
    "solve_extragradient",
    "solve_gap_descent",
    "solve_grid",
    "solve_higher_order",
    "solve_projection",
    "solve_three_step",
    "solve_two_step",
    "solve_varlike",
    "solve_whe",
    "spline_fit",
    "wiener_hopf_residual",
]
