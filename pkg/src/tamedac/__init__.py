"""Spectral solver and strong-convergence benchmark for the stochastic
Allen-Cahn equation on (0, 1) with additive space-time white noise.

Space is discretized by Galerkin projection onto the sine eigenbasis of the
Dirichlet Laplacian; time by an explicit exponential integrator that keeps
the semigroup and the stochastic convolution exact and tames the cubic
drift so steps stay bounded.  The experiments module couples coarse paths
to a fine reference through shared keyed noise and measures the strong
error across resolution ladders.
"""

from .errors import AlignmentError, BlowupError, ResolutionError
from .experiments import (
    ErrorPoint,
    ErrorReport,
    MomentDiagnostics,
    RunConfig,
    coupled_terminal,
    fit_slope,
    moment_diagnostics,
    resolution_pair,
    sample_squared_errors,
    strong_error_study,
)
from .model import ModelParams, eval_poly, nonlinearity_galerkin, tamed_drift
from .noise import (
    NoiseGrid,
    NoiseKey,
    NoiseRealization,
    aggregate_fine_increments,
    aggregate_to_coarse,
    increment_variance,
    increment_variances,
    sample_fine_increment,
    step_normals,
)
from .reporting import emit_csv, emit_loglog_plot, load_error_csv
from .spectral import (
    GridField,
    SpectralField,
    analyze,
    dealias_grid_size,
    eigenvalue,
    eigenvalues,
    grid_points,
    l2_norm,
    phi_factor,
    phi_factors,
    project,
    semigroup_factor,
    semigroup_factors,
    sobolev_norm,
    sup_norm_estimate,
    synthesize,
)
from .stepper import BLOWUP_THRESHOLD, PathResult, SchemeState, simulate_path, step

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "BLOWUP_THRESHOLD",
    "BlowupError",
    "ErrorPoint",
    "ErrorReport",
    "GridField",
    "ModelParams",
    "MomentDiagnostics",
    "NoiseGrid",
    "NoiseKey",
    "NoiseRealization",
    "PathResult",
    "ResolutionError",
    "RunConfig",
    "SchemeState",
    "SpectralField",
    "aggregate_fine_increments",
    "aggregate_to_coarse",
    "analyze",
    "coupled_terminal",
    "dealias_grid_size",
    "eigenvalue",
    "eigenvalues",
    "emit_csv",
    "emit_loglog_plot",
    "eval_poly",
    "fit_slope",
    "grid_points",
    "increment_variance",
    "increment_variances",
    "l2_norm",
    "load_error_csv",
    "moment_diagnostics",
    "nonlinearity_galerkin",
    "phi_factor",
    "phi_factors",
    "project",
    "resolution_pair",
    "sample_fine_increment",
    "sample_squared_errors",
    "semigroup_factor",
    "semigroup_factors",
    "simulate_path",
    "sobolev_norm",
    "step",
    "step_normals",
    "strong_error_study",
    "sup_norm_estimate",
    "synthesize",
    "tamed_drift",
]
