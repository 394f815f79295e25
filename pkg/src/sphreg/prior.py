"""Isotropic Gaussian field priors: truncated expansion sampling and kernels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import HarmonicCoefficients, level_offsets
from .spectra import PowerSpectrum, multiplicities
from .harmonics import legendre_table


@dataclass(frozen=True)
class PriorDraw:
    coeffs: HarmonicCoefficients
    spectrum: PowerSpectrum
    seed: int | None


def sample_prior(spec: PowerSpectrum, seed: int | None = None) -> PriorDraw:
    """Draw independent a_{l,m} ~ N(0, C_l) for every stored mode.

    Levels with C_l = 0 come out exactly zero. Deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    offsets = level_offsets(spec.d, spec.max_degree)
    z = rng.standard_normal(offsets[-1])
    scale = np.repeat(np.sqrt(spec.values), np.diff(offsets))
    coeffs = HarmonicCoefficients(d=spec.d, values=scale * z)
    return PriorDraw(coeffs=coeffs, spectrum=spec, seed=seed)


def covariance_kernel(spec: PowerSpectrum, t) -> np.ndarray | float:
    """Isotropic covariance sum_l C_l (2l+1) P_l(t) at inner products t (d=2).

    Exposed in inner-product coordinates; t is clamped to [-1, 1] so values
    straight from dot products are safe.
    """
    if spec.d != 2:
        raise ValueError("covariance kernel evaluation is implemented for d=2 only")
    t_arr = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), -1.0, 1.0)
    flat = t_arr.ravel()
    table = legendre_table(spec.max_degree, flat)
    weights = spec.values * multiplicities(2, spec.max_degree)
    out = (weights @ table).reshape(t_arr.shape)
    return float(out.ravel()[0]) if np.ndim(t) == 0 else out
