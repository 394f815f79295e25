"""Spherical-harmonic level metadata for general d and a real basis on S^2.

The basis is orthonormal with respect to the uniform *probability* measure,
so Y_{0,0} = 1 and sum_m Y_{l,m}(x)^2 = 2l+1 on S^2. Within a level the real
basis is ordered (zonal, cos terms for m = 1..l, sin terms for m = 1..l);
only convention-invariant quantities should be relied upon downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .geometry import check_unit

if TYPE_CHECKING:
    from .coefficients import HarmonicCoefficients


def multiplicity(d: int, ell: int) -> int:
    """Dimension of the degree-ell eigenspace on S^d (2l+1 when d=2)."""
    if d < 1:
        raise ValueError(f"dimension d must be >= 1, got {d}")
    if ell < 0:
        raise ValueError(f"degree ell must be >= 0, got {ell}")
    if ell == 0:
        return 1
    if ell == 1:
        return d + 1
    # Degree-ell harmonic polynomials in d+1 variables.
    return math.comb(d + ell, ell) - math.comb(d + ell - 2, ell - 2)


def eigenvalue(d: int, ell: int) -> float:
    """Laplace-Beltrami eigenvalue ell*(ell + d - 1)."""
    if d < 1:
        raise ValueError(f"dimension d must be >= 1, got {d}")
    if ell < 0:
        raise ValueError(f"degree ell must be >= 0, got {ell}")
    return float(ell * (ell + d - 1))


@dataclass(frozen=True)
class LevelInfo:
    degree: int
    eigenvalue: float
    multiplicity: int
    dimension: int


def level_info(d: int, ell: int) -> LevelInfo:
    return LevelInfo(
        degree=ell,
        eigenvalue=eigenvalue(d, ell),
        multiplicity=multiplicity(d, ell),
        dimension=d,
    )


def zonal_kernel(ell: int, t) -> np.ndarray | float:
    """Legendre polynomial P_ell(t) by the three-term recurrence; P_ell(1) = 1."""
    if ell < 0:
        raise ValueError(f"degree ell must be >= 0, got {ell}")
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    p_prev = np.ones_like(t)
    if ell == 0:
        return float(p_prev[0]) if scalar else p_prev
    p = t.copy()
    for k in range(1, ell):
        p, p_prev = ((2 * k + 1) * t * p - k * p_prev) / (k + 1), p
    return float(p[0]) if scalar else p


def legendre_table(max_degree: int, t) -> np.ndarray:
    """All Legendre polynomials P_0..P_max at t, stacked on the first axis."""
    t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), -1.0, 1.0)
    out = np.empty((max_degree + 1,) + t.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = t
    for k in range(1, max_degree):
        out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1)
    return out


def _coefficient_count(max_degree: int) -> int:
    return (max_degree + 1) ** 2


def _level_column(ell: int, m: int, kind: str) -> int:
    # Column of (ell, m, kind) inside the flat degree-major layout on S^2.
    base = ell * ell
    if kind == "zonal":
        return base
    if kind == "cos":
        return base + m
    return base + ell + m


def basis_matrix(max_degree: int, points: np.ndarray) -> np.ndarray:
    """Real orthonormal harmonics up to max_degree at unit points in 3-space.

    Returns an (n_points, (max_degree+1)^2) array, degree-major. Uses the
    normalized associated-Legendre recurrence, which keeps every intermediate
    value O(sqrt(2l+1)) and is stable well past degree 200.
    """
    if max_degree < 0:
        raise ValueError(f"max_degree must be >= 0, got {max_degree}")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[-1] != 3:
        raise ValueError(
            "pointwise basis unavailable for this dimension: "
            f"expected points in 3-space (d=2), got length {points.shape[-1]}"
        )
    check_unit(points)

    n = points.shape[0]
    x, y, t = points[:, 0], points[:, 1], points[:, 2]
    t = np.clip(t, -1.0, 1.0)
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    phi = np.arctan2(y, x)

    out = np.empty((n, _coefficient_count(max_degree)))
    sqrt2 = math.sqrt(2.0)

    # q holds Q_{l,m} = sqrt((2l+1)(l-m)!/(l+m)!) P_l^m(t); Q_{0,0} = 1.
    q_sect = np.ones(n)
    for m in range(max_degree + 1):
        if m > 0:
            q_sect = -math.sqrt((2 * m + 1) / (2 * m)) * s * q_sect
        if m == 0:
            cos_m = None
            sin_m = None
        else:
            cos_m = np.cos(m * phi)
            sin_m = np.sin(m * phi)

        q_prev = q_sect
        q_curr = None
        for ell in range(m, max_degree + 1):
            if ell == m:
                q = q_prev
            elif ell == m + 1:
                q_curr = math.sqrt(2 * m + 3) * t * q_prev
                q = q_curr
            else:
                k = ell - 1
                a = math.sqrt((2 * k + 1) * (2 * k + 3) / ((k + 1 - m) * (k + 1 + m)))
                b = math.sqrt(
                    (2 * k + 3) * (k - m) * (k + m) / ((2 * k - 1) * (k + 1 - m) * (k + 1 + m))
                )
                q_next = a * t * q_curr - b * q_prev
                q_prev, q_curr = q_curr, q_next
                q = q_next
            if m == 0:
                out[:, _level_column(ell, 0, "zonal")] = q
            else:
                out[:, _level_column(ell, m, "cos")] = sqrt2 * q * cos_m
                out[:, _level_column(ell, m, "sin")] = sqrt2 * q * sin_m
    return out


def evaluate_basis(max_degree: int, point: np.ndarray) -> np.ndarray:
    """Flat degree-major vector of Y_{l,m}(point) for 0 <= l <= max_degree."""
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise ValueError(f"expected a single point, got shape {point.shape}")
    return basis_matrix(max_degree, point)[0]


def synthesize(coeffs: "HarmonicCoefficients", points: np.ndarray) -> np.ndarray | float:
    """Evaluate sum_{l,m} a_{l,m} Y_{l,m} at one or many points on S^2."""
    if coeffs.d != 2:
        raise ValueError("synthesis requires d=2 coefficients")
    pts = np.asarray(points, dtype=float)
    scalar = pts.ndim == 1
    values = basis_matrix(coeffs.max_degree, pts) @ coeffs.values
    return float(values[0]) if scalar else values
