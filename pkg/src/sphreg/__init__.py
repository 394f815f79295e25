"""Bayesian nonparametric regression on the sphere via harmonic shrinkage.

Isotropic Gaussian field priors are diagonal in the spherical-harmonic basis,
so under uniform random design the regression model reduces to independent
per-mode Gaussian observations. This package provides the harmonic machinery
on S^2 (basis evaluation, quadrature, zonal kernels), Matern-type angular
power spectra, the closed-form truncated posterior with its exact risk
accounting, the penalized least-squares and kernel-ridge formulations of the
posterior mean, and a reproducible benchmark harness with a CLI.
"""

from .coefficients import HarmonicCoefficients
from .geometry import QuadratureGrid, geodesic_distance, quadrature_grid, sample_uniform
from .harmonics import (
    LevelInfo,
    basis_matrix,
    eigenvalue,
    evaluate_basis,
    level_info,
    multiplicity,
    synthesize,
    zonal_kernel,
)
from .spectra import (
    PowerSpectrum,
    check_polydecay,
    matern_spectrum,
    sobolev_norm_sq,
    table_spectrum,
    trace,
)
from .prior import PriorDraw, covariance_kernel, sample_prior
from .sequence_model import (
    PosteriorModel,
    RiskDecomposition,
    expected_posterior_risk,
    posterior,
    posterior_draw,
    simulate_sequence_observations,
    theoretical_rate,
    truncation_level,
    unsaturated_rate,
)
from .regression import (
    Dataset,
    TruthSpec,
    empirical_coefficients,
    fit,
    generate_dataset,
    generate_truth,
    rmse,
)
from .variational import (
    KrrFit,
    PenalizedObjective,
    empirical_ridge,
    krr_dual,
    matern_penalty,
    minimize_sequence_objective,
)
from .experiments import (
    ContractionReport,
    ExperimentConfig,
    ReportRow,
    derive_seed,
    emit_report,
    fit_loglog_slope,
    miscalibration_configs,
    run_contraction_study,
    run_miscalibration_study,
)

__version__ = "0.1.0"

__all__ = [
    "HarmonicCoefficients",
    "QuadratureGrid",
    "geodesic_distance",
    "quadrature_grid",
    "sample_uniform",
    "LevelInfo",
    "basis_matrix",
    "eigenvalue",
    "evaluate_basis",
    "level_info",
    "multiplicity",
    "synthesize",
    "zonal_kernel",
    "PowerSpectrum",
    "check_polydecay",
    "matern_spectrum",
    "sobolev_norm_sq",
    "table_spectrum",
    "trace",
    "PriorDraw",
    "covariance_kernel",
    "sample_prior",
    "PosteriorModel",
    "RiskDecomposition",
    "expected_posterior_risk",
    "posterior",
    "posterior_draw",
    "simulate_sequence_observations",
    "theoretical_rate",
    "truncation_level",
    "unsaturated_rate",
    "Dataset",
    "TruthSpec",
    "empirical_coefficients",
    "fit",
    "generate_dataset",
    "generate_truth",
    "rmse",
    "KrrFit",
    "PenalizedObjective",
    "empirical_ridge",
    "krr_dual",
    "matern_penalty",
    "minimize_sequence_objective",
    "ContractionReport",
    "ExperimentConfig",
    "ReportRow",
    "derive_seed",
    "emit_report",
    "fit_loglog_slope",
    "miscalibration_configs",
    "run_contraction_study",
    "run_miscalibration_study",
]
