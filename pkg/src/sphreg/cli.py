"""Command-line front end: spectra, prior simulation, fitting, benchmarks.

Exit codes: 0 success, 2 invalid parameters or configuration, 3 I/O or data
format errors. Every command prints its fully resolved configuration before
computing, and all randomness flows from one printed master seed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import asdict, fields, replace

import numpy as np

from . import io
from .experiments import (
    ExperimentConfig,
    emit_report,
    fit_loglog_slope,
    miscalibration_configs,
    run_contraction_study,
    run_miscalibration_study,
)
from .harmonics import basis_matrix, eigenvalue, multiplicity
from .prior import sample_prior
from .regression import fit as fit_posterior
from .sequence_model import truncation_level
from .spectra import matern_spectrum, trace_partial_sums

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

MISCALIBRATION_ALPHAS = (1.0, 2.0, 3.0)


class ConfigError(ValueError):
    pass


def _print_config(pairs) -> None:
    print("resolved configuration:")
    for key, value in pairs:
        print(f"  {key} = {value}")


def _parse_sample_sizes(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"bad sample_sizes value {raw!r}") from None


def _coerce_config_value(key: str, raw: str):
    raw = raw.strip()
    if key in ("d", "truth_degree", "repetitions", "seed"):
        return int(raw)
    if key in ("alpha", "beta", "kappa", "sigma", "c"):
        return float(raw)
    if key == "sample_sizes":
        return _parse_sample_sizes(raw)
    if key == "pathway":
        return raw
    if key == "grid_degree":
        return None if raw.lower() in ("auto", "none") else int(raw)
    raise KeyError(key)


def read_config_file(path) -> dict:
    """Flat `key = value` config; keys mirror the experiment config fields."""
    known = {f.name for f in fields(ExperimentConfig)}
    values, bad = {}, []
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise io.DataFormatError(str(exc.strerror or exc), path) from exc
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            bad.append(f"line {line_no}: missing '='")
            continue
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in known:
            bad.append(f"line {line_no}: unknown key {key!r}")
            continue
        try:
            values[key] = _coerce_config_value(key, raw)
        except (ValueError, ConfigError):
            bad.append(f"line {line_no}: bad value for {key!r}: {raw.strip()!r}")
    if bad:
        raise ConfigError(f"config file {path}: " + "; ".join(bad))
    return values


def _build_experiment_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config is not None:
        cfg = replace(cfg, **read_config_file(args.config))
    overrides = {}
    for key in (
        "alpha", "beta", "kappa", "sigma", "c", "truth_degree",
        "repetitions", "seed", "pathway", "grid_degree",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "sample_sizes", None) is not None:
        overrides["sample_sizes"] = _parse_sample_sizes(args.sample_sizes)
    cfg = replace(cfg, **overrides)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def cmd_spectrum(args) -> int:
    _print_config(
        [("d", args.d), ("alpha", args.alpha), ("kappa", args.kappa), ("L", args.L)]
    )
    spec = matern_spectrum(args.d, args.alpha, args.kappa, args.L)
    cumulative = trace_partial_sums(spec)
    print(f"{'ell':>5} {'lambda':>12} {'mult':>8} {'C':>24} {'cum_trace':>24}")
    for ell, value in enumerate(spec.values):
        lam = eigenvalue(args.d, ell)
        print(
            f"{ell:>5} {lam:>12.1f} {multiplicity(args.d, ell):>8} "
            f"{value:>24.16e} {cumulative[ell]:>24.16e}"
        )
    if args.csv is not None:
        io.write_spectrum_csv(spec, args.csv)
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_simulate_prior(args) -> int:
    _print_config(
        [
            ("d", 2), ("alpha", args.alpha), ("kappa", args.kappa),
            ("L", args.L), ("seed", args.seed), ("out", args.out),
            ("figure", args.figure),
        ]
    )
    print(f"master seed: {args.seed}")
    spec = matern_spectrum(2, args.alpha, args.kappa, args.L)
    draw = sample_prior(spec, seed=args.seed)
    io.write_coefficients_csv(draw.coeffs, args.out)
    print(f"wrote {args.out}")
    print(f"draw L2 norm = {math.sqrt(draw.coeffs.norm_sq()):.6f}")
    if args.figure is not None:
        from .figures import render_field_map

        render_field_map(draw.coeffs, args.figure, title=f"prior draw (seed {args.seed})")
        print(f"wrote {args.figure}")
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.spectrum is not None:
        spec = io.read_spectrum_csv(args.spectrum)
    else:
        spec = None
    data = io.read_dataset_csv(args.data, noise_var=args.sigma**2)
    n_eff = data.n if args.n is None else args.n
    if args.L == "auto":
        if spec is not None:
            raise ConfigError("--L auto needs matern parameters, not a table spectrum")
        level = truncation_level(n_eff, args.alpha, 2, args.c)
    else:
        try:
            level = int(args.L)
        except ValueError:
            raise ConfigError(f"--L must be an integer or 'auto', got {args.L!r}") from None
        if level < 0:
            raise ConfigError(f"--L must be >= 0, got {level}")
    if spec is None:
        spec = matern_spectrum(2, args.alpha, args.kappa, level)
    elif spec.max_degree < level:
        raise ConfigError(
            f"table spectrum stops at degree {spec.max_degree}, need {level}"
        )
    _print_config(
        [
            ("data", args.data), ("sigma", args.sigma),
            ("alpha", args.alpha if args.spectrum is None else "(table)"),
            ("kappa", args.kappa if args.spectrum is None else "(table)"),
            ("L", level), ("c", args.c), ("n", n_eff), ("out", args.out),
        ]
    )
    model = fit_posterior(data, spec, level)
    io.write_posterior_csv(model, args.out)
    fitted = basis_matrix(level, data.points) @ model.means.values
    residuals = data.responses - fitted
    print(f"n = {data.n}")
    print(f"L_n = {level}")
    print(
        f"residuals: rms = {float(np.sqrt(np.mean(residuals**2))):.6g}, "
        f"mean = {float(np.mean(residuals)):.6g}"
    )
    print(f"wrote {args.out}")
    return EXIT_OK


def _report_label(report) -> str:
    return f"alpha={report.config.alpha:g}"


def _print_slope_line(report, prefix: str = "") -> None:
    line = f"{prefix}slope={report.slope:.6f} theoretical={report.theoretical_slope:.6f}"
    if report.theoretical_slope != report.theoretical_slope_unsaturated:
        line += f" (unsaturated {report.theoretical_slope_unsaturated:.6f})"
    print(line)


def _emit_study_outputs(report, out_dir, stem, formats, figure) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for fmt in formats:
        path = os.path.join(out_dir, f"{stem}.{fmt}")
        emit_report(report, fmt, path)
        print(f"wrote {path}")
    if figure:
        from .figures import render_report_figure

        path = os.path.join(out_dir, f"{stem}.svg")
        render_report_figure(report, path, title=stem.replace("_", " "))
        print(f"wrote {path}")


def cmd_benchmark(args) -> int:
    cfg = _build_experiment_config(args)
    _print_config(sorted(asdict(cfg).items()))
    print(f"master seed: {cfg.seed}")
    workers = args.workers if args.workers > 0 else (os.cpu_count() or 1)
    formats = [fmt.strip() for fmt in args.formats.split(",") if fmt.strip()]
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {fmt!r} (expected csv or json)")
    if args.study == "contraction":
        report = run_contraction_study(cfg, workers=workers)
        _emit_study_outputs(report, args.out, "contraction", formats, args.figure)
        _print_slope_line(report)
    else:
        cfgs = miscalibration_configs(cfg, MISCALIBRATION_ALPHAS)
        reports = run_miscalibration_study(cfgs, workers=workers)
        for report in reports:
            stem = f"miscalibration_alpha{report.config.alpha:g}"
            _emit_study_outputs(report, args.out, stem, formats, args.figure)
        for report in reports:
            _print_slope_line(report, prefix=_report_label(report) + " ")
    return EXIT_OK


def cmd_slope(args) -> int:
    _print_config([("table", args.table)])
    pairs = io.read_rmse_table(args.table)
    slope, intercept, stderr = fit_loglog_slope(pairs)
    print(f"slope={slope:.6f} stderr={stderr:.6f} intercept={intercept:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphreg",
        description="Bayesian regression on the sphere via harmonic shrinkage",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="print a Matern angular power spectrum")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--csv", default=None, help="also write the table as ell,C")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate-prior", help="sample a prior field draw")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--L", type=int, default=30)
    p.add_argument("--seed", type=int, default=20240101)
    p.add_argument("--out", required=True, help="coefficient CSV (ell,m,coeff)")
    p.add_argument("--figure", default=None, help="optional field-map image path")
    p.set_defaults(func=cmd_simulate_prior)

    p = sub.add_parser("fit", help="fit one dataset CSV")
    p.add_argument("--data", required=True, help="dataset CSV (x,y,z,response)")
    p.add_argument("--sigma", type=float, default=0.5, help="known noise sd")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--spectrum", default=None, help="table spectrum CSV instead of matern")
    p.add_argument("--L", default="auto", help="truncation degree or 'auto'")
    p.add_argument("--c", type=float, default=2.5, help="truncation constant for auto")
    p.add_argument(
        "--n", type=int, default=None,
        help="override the sample size used by the auto rule",
    )
    p.add_argument(
        "--n-from-data", action="store_true",
        help="size the auto rule from the dataset rows (the default)",
    )
    p.add_argument("--out", required=True, help="output CSV (ell,m,mean,variance)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("benchmark", help="run a contraction or mis-calibration study")
    p.add_argument("--study", choices=("contraction", "miscalibration"), default="contraction")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--truth-degree", dest="truth_degree", type=int, default=None)
    p.add_argument("--sample-sizes", dest="sample_sizes", default=None)
    p.add_argument("--reps", dest="repetitions", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--pathway", choices=("empirical", "sequence"), default=None)
    p.add_argument("--grid-degree", dest="grid_degree", type=int, default=None)
    p.add_argument("--formats", default="csv,json")
    p.add_argument("--figure", dest="figure", action="store_true", default=True)
    p.add_argument("--no-figure", dest="figure", action="store_false")
    p.add_argument(
        "--workers", type=int, default=0,
        help="parallel workers; 0 means all available cores",
    )
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("slope", help="log-log slope of an (n, rmse) table")
    p.add_argument("table", help="report CSV or two-column n,rmse CSV")
    p.set_defaults(func=cmd_slope)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except io.DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
