"""Sparse NMF via alternating constrained least squares.

ACLS and AHCLS solvers with MU and GDCLS baselines, six initialization
strategies, Frobenius / angular convergence criteria, text-corpus ingestion,
and an SVD-normalized benchmark harness.
"""

__version__ = "0.1.0"

from .bench import BenchReport, compare_inits, multi_restart, relative_error, svd_baseline_error
from .convergence import (
    AngularTol,
    ConvergenceTrace,
    FrobeniusTol,
    MaxIterOnly,
    angular_measure,
    match_columns,
    should_stop,
)
from .corpus import Vocabulary, build_matrix, build_matrix_from_texts, mini_matrix, top_terms
from .initializers import InitStrategy, initialize
from .linalg import (
    SvdTriple,
    centroid_decomposition,
    gram,
    residual_trace,
    solve_spd_multi,
    trace_frob_sq,
    truncated_svd,
)
from .solvers import (
    FactorPair,
    SolveResult,
    SolverConfig,
    StationarityReport,
    acls_step,
    ahcls_beta,
    ahcls_step,
    gdcls_step,
    mu_step,
    objective_sq,
    solve,
    sparsity_hoyer,
    stationarity_check,
)

__all__ = [
    "AngularTol",
    "BenchReport",
    "ConvergenceTrace",
    "FactorPair",
    "FrobeniusTol",
    "InitStrategy",
    "MaxIterOnly",
    "SolveResult",
    "SolverConfig",
    "StationarityReport",
    "SvdTriple",
    "Vocabulary",
    "acls_step",
    "ahcls_beta",
    "ahcls_step",
    "angular_measure",
    "build_matrix",
    "build_matrix_from_texts",
    "centroid_decomposition",
    "compare_inits",
    "gdcls_step",
    "gram",
    "initialize",
    "match_columns",
    "mini_matrix",
    "mu_step",
    "multi_restart",
    "objective_sq",
    "relative_error",
    "residual_trace",
    "should_stop",
    "solve",
    "solve_spd_multi",
    "sparsity_hoyer",
    "stationarity_check",
    "svd_baseline_error",
    "top_terms",
    "trace_frob_sq",
    "truncated_svd",
]
