"""Reproducible contraction and mis-calibration benchmark studies.

Seeding scheme: one master seed drives everything. The truth draw uses the
derived stream (master, 0); repetition (n, rep) uses (master, 1, n, rep), so
adding sample sizes or repetitions never perturbs other cells. Results are
keyed by cell index and reduced in fixed order, which makes reports
byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .coefficients import HarmonicCoefficients
from .geometry import quadrature_grid
from .regression import TruthSpec, fit, generate_dataset, generate_truth, rmse
from .sequence_model import (
    posterior,
    simulate_sequence_observations,
    theoretical_rate,
    truncation_level,
    unsaturated_rate,
)
from .spectra import check_smoothness, matern_spectrum

_TRUTH_STREAM = 0
_REP_STREAM = 1

PATHWAYS = ("empirical", "sequence")


def derive_seed(master: int, *keys: int) -> int:
    """Deterministic child seed from the master seed and integer keys."""
    ss = np.random.SeedSequence([int(master), *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """Run parameters for one study; defaults mirror the benchmark setup."""

    d: int = 2
    alpha: float = 2.0
    beta: float = 2.0
    kappa: float = 1.0
    sigma: float = 0.5
    c: float = 2.5
    truth_degree: int = 10
    sample_sizes: tuple[int, ...] = (50, 100, 200, 400, 800, 1600, 3200)
    repetitions: int = 50
    seed: int = 20240101
    pathway: str = "empirical"
    grid_degree: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))

    def validate(self) -> None:
        if self.d != 2:
            raise ValueError("spatial studies require d=2")
        check_smoothness(self.alpha, self.d)
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.c <= 0:
            raise ValueError(f"truncation constant must be positive, got {self.c}")
        if self.truth_degree < 0:
            raise ValueError(f"truth degree must be >= 0, got {self.truth_degree}")
        if len(self.sample_sizes) == 0:
            raise ValueError("sample_sizes must be nonempty")
        if any(n < 1 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 1")
        if any(b <= a for a, b in zip(self.sample_sizes, self.sample_sizes[1:])):
            raise ValueError("sample sizes must be strictly increasing")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.pathway not in PATHWAYS:
            raise ValueError(f"pathway must be one of {PATHWAYS}, got {self.pathway!r}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.grid_degree is not None and self.grid_degree < 0:
            raise ValueError(f"grid degree must be >= 0, got {self.grid_degree}")

    def truncation_levels(self) -> tuple[int, ...]:
        return tuple(
            truncation_level(n, self.alpha, self.d, self.c) for n in self.sample_sizes
        )

    def resolved_grid_degree(self) -> int:
        """Configured grid degree, or an automatic one covering every fit."""
        needed = max(max(self.truncation_levels()), self.truth_degree)
        if self.grid_degree is not None:
            if self.grid_degree < needed:
                raise ValueError(
                    f"grid degree {self.grid_degree} insufficient: need at least {needed}"
                )
            return self.grid_degree
        return max(2 * self.truth_degree + 2, needed)


@dataclass(frozen=True)
class ReportRow:
    n: int
    trunc_degree: int
    rmse_mean: float
    rmse_sd: float


@dataclass(frozen=True)
class ContractionReport:
    """Aggregated study output: one row per sample size plus fitted slopes."""

    config: ExperimentConfig
    rows: tuple[ReportRow, ...]
    slope: float
    slope_stderr: float
    intercept: float
    theoretical_slope: float
    theoretical_slope_unsaturated: float
    truth_seed: int


def fit_loglog_slope(pairs) -> tuple[float, float, float]:
    """OLS of log(rmse) on log(n): returns (slope, intercept, stderr).

    stderr is the usual residual-based standard error of the slope; with
    exactly two points there are no residual degrees of freedom and it is 0.
    """
    pairs = [(float(n), float(r)) for n, r in pairs]
    if len(pairs) < 2:
        raise ValueError("slope fit needs at least 2 points")
    if any(n <= 0 or r <= 0 for n, r in pairs):
        raise ValueError("slope fit needs positive sample sizes and rmse values")
    x = np.log([n for n, _ in pairs])
    y = np.log([r for _, r in pairs])
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    if len(pairs) == 2:
        return slope, intercept, 0.0
    resid = y - design @ coef
    s_sq = float(resid @ resid) / (len(pairs) - 2)
    sxx = float(np.sum((x - x.mean()) ** 2))
    return slope, intercept, math.sqrt(s_sq / sxx)


def _cell_rmse(task) -> float:
    """One (n, rep) cell; self-contained so cells can run in worker processes."""
    (truth_values, n, level, rep_seed, alpha, kappa, sigma, pathway, grid_degree) = task
    truth = HarmonicCoefficients(d=2, values=np.asarray(truth_values))
    spec = matern_spectrum(2, alpha, kappa, level)
    grid = quadrature_grid(grid_degree)
    if pathway == "empirical":
        data = generate_dataset(truth, n, sigma, seed=rep_seed)
        model = fit(data, spec, level)
    else:
        padded = truth.padded(level)
        observed = simulate_sequence_observations(padded, sigma, n, seed=rep_seed)
        model = posterior(observed, spec, sigma, n, level)
    return rmse(model, truth, grid)


def _run_cells(tasks, workers: int) -> list[float]:
    if workers <= 1 or len(tasks) <= 1:
        return [_cell_rmse(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (8 * workers))
        return list(pool.map(_cell_rmse, tasks, chunksize=chunk))


def run_contraction_study(cfg: ExperimentConfig, workers: int = 1) -> ContractionReport:
    """Full study: fresh truth per master seed, fresh design and noise per rep."""
    cfg.validate()
    levels = cfg.truncation_levels()
    grid_degree = cfg.resolved_grid_degree()
    truth_seed = derive_seed(cfg.seed, _TRUTH_STREAM)
    truth = generate_truth(
        TruthSpec(beta=cfg.beta, max_degree=cfg.truth_degree, seed=truth_seed)
    )
    tasks = [
        (
            truth.values,
            n,
            level,
            derive_seed(cfg.seed, _REP_STREAM, n, rep),
            cfg.alpha,
            cfg.kappa,
            cfg.sigma,
            cfg.pathway,
            grid_degree,
        )
        for n, level in zip(cfg.sample_sizes, levels)
        for rep in range(cfg.repetitions)
    ]
    flat = np.array(_run_cells(tasks, workers))
    per_n = flat.reshape(len(cfg.sample_sizes), cfg.repetitions)
    rows = tuple(
        ReportRow(
            n=n,
            trunc_degree=level,
            rmse_mean=float(values.mean()),
            rmse_sd=float(values.std(ddof=1)) if cfg.repetitions > 1 else 0.0,
        )
        for n, level, values in zip(cfg.sample_sizes, levels, per_n)
    )
    slope, intercept, stderr = fit_loglog_slope([(row.n, row.rmse_mean) for row in rows])
    return ContractionReport(
        config=cfg,
        rows=rows,
        slope=slope,
        slope_stderr=stderr,
        intercept=intercept,
        theoretical_slope=theoretical_rate(cfg.alpha, cfg.beta, cfg.d),
        theoretical_slope_unsaturated=unsaturated_rate(cfg.alpha, cfg.beta, cfg.d),
        truth_seed=truth_seed,
    )


def miscalibration_configs(
    base: ExperimentConfig, alphas=(1.0, 2.0, 3.0)
) -> list[ExperimentConfig]:
    """Per-alpha configs sharing the base truth, noise level, and seeds."""
    return [replace(base, alpha=float(a)) for a in alphas]


def run_miscalibration_study(
    cfgs, workers: int = 1
) -> list[ContractionReport]:
    """One report per prior smoothness; truth, noise, and data seeds shared.

    The truth seed depends only on the master seed and the rep seeds only on
    (master, n, rep), so every config fits the same datasets with its own
    truncation rule.
    """
    cfgs = list(cfgs)
    if not cfgs:
        raise ValueError("need at least one config")
    shared = [asdict(replace(cfg, alpha=0.0, grid_degree=None)) for cfg in cfgs]
    if any(other != shared[0] for other in shared[1:]):
        raise ValueError("mis-calibration configs must differ only in alpha")
    if len({cfg.alpha for cfg in cfgs}) != len(cfgs):
        raise ValueError("mis-calibration alphas must be distinct")
    return [run_contraction_study(cfg, workers=workers) for cfg in cfgs]


def report_to_dict(report: ContractionReport) -> dict:
    cfg = asdict(report.config)
    cfg["sample_sizes"] = list(cfg["sample_sizes"])
    return {
        "config": cfg,
        "truth_seed": report.truth_seed,
        "rows": [
            {
                "n": row.n,
                "L_n": row.trunc_degree,
                "rmse_mean": row.rmse_mean,
                "rmse_sd": row.rmse_sd,
            }
            for row in report.rows
        ],
        "slope": report.slope,
        "slope_stderr": report.slope_stderr,
        "intercept": report.intercept,
        "theoretical_slope": report.theoretical_slope,
        "theoretical_slope_unsaturated": report.theoretical_slope_unsaturated,
    }


def report_from_dict(payload: dict) -> ContractionReport:
    cfg_raw = dict(payload["config"])
    cfg_raw["sample_sizes"] = tuple(cfg_raw["sample_sizes"])
    cfg = ExperimentConfig(**cfg_raw)
    rows = tuple(
        ReportRow(
            n=int(row["n"]),
            trunc_degree=int(row["L_n"]),
            rmse_mean=float(row["rmse_mean"]),
            rmse_sd=float(row["rmse_sd"]),
        )
        for row in payload["rows"]
    )
    return ContractionReport(
        config=cfg,
        rows=rows,
        slope=float(payload["slope"]),
        slope_stderr=float(payload["slope_stderr"]),
        intercept=float(payload["intercept"]),
        theoretical_slope=float(payload["theoretical_slope"]),
        theoretical_slope_unsaturated=float(payload["theoretical_slope_unsaturated"]),
        truth_seed=int(payload["truth_seed"]),
    )


def emit_report(report: ContractionReport, format: str, path) -> None:
    """Write a report as CSV (`n,L_n,rmse_mean,rmse_sd`) or JSON."""
    from . import io

    if format == "csv":
        io.write_report_csv(report, path)
    elif format == "json":
        io.write_report_json(report, path)
    else:
        raise ValueError(f"unknown report format {format!r} (expected 'csv' or 'json')")
