"""Penalized least-squares characterizations of the posterior mean.

Three routes to the same estimator:
  * `minimize_sequence_objective`: the sequence-coordinate objective, whose
    minimizer is the shrinkage posterior mean in closed form (exact identity);
  * `empirical_ridge`: the literal finite-sample functional on the design,
    solved as a symmetric positive-definite linear system;
  * `krr_dual`: the kernel ridge dual through the truncated Gram matrix.

The sequence identity is exact; the empirical primal and the dual agree with
each other exactly but approach the sequence solution only as the design
Gram matrix concentrates at the identity, so that gap is measured, not
assumed away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg as sla

from .coefficients import HarmonicCoefficients, level_offsets
from .harmonics import basis_matrix, eigenvalue
from .prior import covariance_kernel
from .regression import Dataset
from .spectra import PowerSpectrum


@dataclass(frozen=True)
class PenalizedObjective:
    """Sequence-coordinate objective sum (ahat - a)^2 + (sigma^2/n) sum a^2/C_l.

    Modes with C_l = 0 carry an infinite penalty and are pinned to zero, so
    their weight is stored as +inf and skipped in evaluations.
    """

    spectrum: PowerSpectrum
    sigma: float
    n: int
    trunc_degree: int

    @property
    def mode_weights(self) -> np.ndarray:
        """Penalty weight sigma^2/(n C_l) per retained mode (+inf where C_l = 0)."""
        c = self.spectrum.values[: self.trunc_degree + 1]
        offsets = level_offsets(self.spectrum.d, self.trunc_degree)
        with np.errstate(divide="ignore"):
            per_level = np.where(c > 0, self.sigma**2 / (self.n * c), np.inf)
        return np.repeat(per_level, np.diff(offsets))

    def value(self, coeffs: HarmonicCoefficients, observed: HarmonicCoefficients) -> float:
        """Objective value; infinite if any pinned mode is nonzero."""
        size = level_offsets(self.spectrum.d, self.trunc_degree)[-1]
        a = coeffs.values[:size]
        ahat = observed.values[:size]
        w = self.mode_weights
        pinned = np.isinf(w)
        if np.any(a[pinned] != 0.0):
            return math.inf
        fit_term = float(np.sum((ahat - a) ** 2))
        pen_term = float(np.sum(w[~pinned] * a[~pinned] ** 2))
        return fit_term + pen_term


def minimize_sequence_objective(
    observed: HarmonicCoefficients,
    spec: PowerSpectrum,
    sigma: float,
    n: int,
    trunc_degree: int,
) -> HarmonicCoefficients:
    """Closed-form minimizer a_{l,m} = ahat_{l,m} / (1 + sigma^2/(n C_l)).

    This is the stationarity condition of the per-mode quadratic and coincides
    with the posterior mean; modes with C_l = 0 are pinned to zero.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if trunc_degree > min(observed.max_degree, spec.max_degree):
        raise ValueError(
            f"truncation degree {trunc_degree} exceeds available degree "
            f"{min(observed.max_degree, spec.max_degree)}"
        )
    c = spec.values[: trunc_degree + 1]
    offsets = level_offsets(observed.d, trunc_degree)
    with np.errstate(divide="ignore"):
        gain = np.where(c > 0, 1.0 / (1.0 + sigma**2 / (n * c)), 0.0)
    values = np.repeat(gain, np.diff(offsets)) * observed.values[: offsets[-1]]
    return HarmonicCoefficients(d=observed.d, values=values)


def matern_penalty(
    coeffs: HarmonicCoefficients, alpha: float, kappa: float, d: Optional[int] = None
) -> float:
    """Smoothing-spline penalty sum_l (kappa^2 + lambda_l)^alpha sum_m a_{l,m}^2."""
    if d is not None and d != coeffs.d:
        raise ValueError(f"dimension mismatch: coefficients have d={coeffs.d}, got d={d}")
    lam = np.array([eigenvalue(coeffs.d, ell) for ell in range(coeffs.max_degree + 1)])
    return float(np.dot((kappa**2 + lam) ** alpha, coeffs.level_norms_sq()))


def _mode_inverse_variances(spec: PowerSpectrum, trunc_degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-mode 1/C_l and the pinned mask (C_l = 0) for the ridge system."""
    c = spec.values[: trunc_degree + 1]
    offsets = level_offsets(spec.d, trunc_degree)
    c_modes = np.repeat(c, np.diff(offsets))
    pinned = c_modes == 0.0
    inv = np.zeros_like(c_modes)
    inv[~pinned] = 1.0 / c_modes[~pinned]
    return inv, pinned


def empirical_ridge(data: Dataset, spec: PowerSpectrum, trunc_degree: int) -> HarmonicCoefficients:
    """Exact minimizer of the literal penalized empirical functional.

    Solves (G^T G / n + (sigma^2/n) D) a = G^T y / n with G the design basis
    matrix and D = diag(1/C_l) per mode, by dense Cholesky. Modes with
    C_l = 0 are pinned to zero and removed from the system, which keeps it
    symmetric positive definite for any design.
    """
    if trunc_degree > spec.max_degree:
        raise ValueError(
            f"truncation degree {trunc_degree} exceeds spectrum degree {spec.max_degree}"
        )
    basis = basis_matrix(trunc_degree, data.points)
    n = data.n
    inv_c, pinned = _mode_inverse_variances(spec, trunc_degree)
    free = ~pinned
    g = basis[:, free]
    system = g.T @ g / n + (data.noise_var / n) * np.diag(inv_c[free])
    rhs = g.T @ data.responses / n
    try:
        factor = sla.cho_factor(system)
        solution = sla.cho_solve(factor, rhs)
    except sla.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"ridge system singular (degenerate design with pinned modes): {exc}"
        ) from exc
    values = np.zeros(inv_c.size)
    values[free] = solution
    return HarmonicCoefficients(d=2, values=values)


@dataclass(frozen=True)
class KrrFit:
    """Dual kernel-ridge solution; predicts through the truncated kernel."""

    train_points: np.ndarray
    dual_coef: np.ndarray
    spectrum: PowerSpectrum
    trunc_degree: int
    noise_var: float

    def predict(self, points: np.ndarray) -> np.ndarray | float:
        pts = np.asarray(points, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        gram = covariance_kernel(
            self.spectrum.truncated(self.trunc_degree), pts @ self.train_points.T
        )
        out = gram @ self.dual_coef
        return float(out[0]) if scalar else out


def krr_dual(data: Dataset, spec: PowerSpectrum, trunc_degree: int) -> KrrFit:
    """Kernel ridge regression with ridge sigma^2/n and the truncated kernel.

    Solves (K + n lambda_n I) u = y where K_ij = sum_{l<=L} C_l (2l+1)
    P_l(<x_i, x_j>) and lambda_n = sigma^2/n; fitted values are K u and agree
    with the primal ridge synthesis.
    """
    if trunc_degree > spec.max_degree:
        raise ValueError(
            f"truncation degree {trunc_degree} exceeds spectrum degree {spec.max_degree}"
        )
    trunc = spec.truncated(trunc_degree)
    gram = covariance_kernel(trunc, data.points @ data.points.T)
    system = gram + data.noise_var * np.eye(data.n)
    try:
        factor = sla.cho_factor(system)
        dual = sla.cho_solve(factor, data.responses)
    except sla.LinAlgError as exc:
        cond = np.linalg.cond(system)
        raise np.linalg.LinAlgError(
            f"Gram solve failed (condition estimate {cond:.3e}): {exc}"
        ) from exc
    return KrrFit(
        train_points=data.points,
        dual_coef=dual,
        spectrum=spec,
        trunc_degree=trunc_degree,
        noise_var=data.noise_var,
    )
