"""Simulator for fixed-point quantum search over continuous domains."""

__version__ = "0.1.0"

from .engine import (DensityState, Trace, TwoLevelState, apply_iteration, initial_state, minimal_queries,
                     run_fixed_point, run_naive_grover, run_noisy, run_pi3)
from .overlap import OverlapEstimate, classical_expected_iterations, estimate_lambda_grid, estimate_lambda_mc
from .problems import SearchProblem, TestFunction, builtin_suite, gradient_indicator, to_search_problem
from .schedule import AngleSchedule, build_schedule, chebyshev_T, lower_bound_queries, pi3_queries, required_queries
from .spectral import (ModeGrid, SpectralProblem, discretize_operator, post_search_distribution,
                       simulate_oracle_pipeline, spectral_lambda, verify_gate_decomposition)
