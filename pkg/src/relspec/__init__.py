"""Matrix-free spectral-norm minimization with relative-scale accuracy.

The package solves min_x ||sum_i x_i A_i - C|| in the largest-singular-value
norm to a multiplicative accuracy target, using cheap rank-one stochastic
subgradients built from short power chains (p single-factor products per
sample) inside an averaging subgradient method whose step and budget are
derived from the target ratio alone.
"""
from __future__ import annotations

from .errors import (
    IllConditionedError,
    KernelHit,
    NumericalFailure,
    ParameterError,
)
from .evaluation import (
    EvalConfig,
    NormEstimate,
    relative_accuracy,
    spectral_norm_exact,
    spectral_norm_power,
)
from .harness import (
    TaskSpec,
    build_problem,
    compare_oracles,
    gen_dense,
    gen_sparse,
    run_task,
)
from .matrices import (
    RngStream,
    as_dense,
    as_sparse,
    frobenius_inner,
    matvec,
    matvec_transpose,
    sample_unit_sphere,
)
from .oracles import (
    KERNEL_EPS,
    PowerChainResult,
    RankOneRect,
    RankOneSym,
    RankTwoSym,
    approximation_ratio,
    estimate_power_mean,
    gram_gradient_sample,
    power_chain,
    power_iteration_sample,
    sample_gradient,
    sample_value,
    square_gradient_sample,
)
from .regression import (
    RegressionProblem,
    RunParameters,
    adjoint_apply_rank_one,
    build_gram,
    initial_point,
    load_problem,
    make_problem,
    operator_apply,
    regression_oracle,
    save_problem,
    select_parameters,
    solve_regression,
)
from .sgm import (
    GramSystem,
    SolverState,
    gradient_step,
    iteration_budget,
    iteration_budget_composition,
    sgm_run,
    step_composition,
    step_constant_delta,
    step_fixed_horizon_optimal,
)
from .trace import (
    CSV_HEADER,
    RunTrace,
    TraceRow,
    TraceWriter,
    parse_trace,
    parse_traces,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "EvalConfig",
    "GramSystem",
    "IllConditionedError",
    "KERNEL_EPS",
    "KernelHit",
    "NormEstimate",
    "NumericalFailure",
    "ParameterError",
    "PowerChainResult",
    "RankOneRect",
    "RankOneSym",
    "RankTwoSym",
    "RegressionProblem",
    "RngStream",
    "RunParameters",
    "RunTrace",
    "SolverState",
    "TaskSpec",
    "TraceRow",
    "TraceWriter",
    "adjoint_apply_rank_one",
    "approximation_ratio",
    "as_dense",
    "as_sparse",
    "build_gram",
    "build_problem",
    "compare_oracles",
    "estimate_power_mean",
    "frobenius_inner",
    "gen_dense",
    "gen_sparse",
    "gradient_step",
    "gram_gradient_sample",
    "initial_point",
    "iteration_budget",
    "iteration_budget_composition",
    "load_problem",
    "make_problem",
    "matvec",
    "matvec_transpose",
    "operator_apply",
    "parse_trace",
    "parse_traces",
    "power_chain",
    "power_iteration_sample",
    "regression_oracle",
    "relative_accuracy",
    "run_task",
    "sample_gradient",
    "sample_unit_sphere",
    "sample_value",
    "save_problem",
    "select_parameters",
    "sgm_run",
    "solve_regression",
    "spectral_norm_exact",
    "spectral_norm_power",
    "square_gradient_sample",
    "step_composition",
    "step_constant_delta",
    "step_fixed_horizon_optimal",
    "write_trace",
]
