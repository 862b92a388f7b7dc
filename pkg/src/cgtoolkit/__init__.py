"""Conditional-gradient solvers for composite objectives, with a benchmark harness."""

from .gaps import (GapReport, StationarityVerdict, epsilon_stationarity_certificate,
                   fw_gap, gap_report, grad_map_norm)
from .harness import (ConfigValidationError, RateFit, RateFitError, ReplicationReport,
                      RunConfig, RunSummary, budget_sweep, check_config, execute,
                      fit_rate, load_config, preset_config, preset_names, replicate,
                      run, save_config, table1_suite)
from .problems import (CATALOG, HolderReport, InfeasiblePointError, ProblemConfigError,
                       ProblemSpec, SmoothTerm, StochasticOracle, build_spec,
                       check_gradient_consistency, check_holder, eval_psi,
                       make_smooth_term, minibatch_grad, stochastic_grad)
from .solvers import (IterateRecord, LineSearchStallError, RscgtPlan, RunTrace,
                      SolverConfigError, SolverRuntimeError, StepsizeSchedule,
                      plan_rscgt, run_cgt, run_cgt_ls, run_fcgt, run_rscgt, sample_r)
from .subproblems import (CompositeLMO, SubproblemError, brute_force_solve, lmo_kinds,
                          make_lmo)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
