"""Points on the unit sphere, uniform random design, and quadrature grids.

All integrals on S^2 are taken against the uniform *probability* measure, so
quadrature weights sum to one and the constant function integrates to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_NORM_TOL = 1e-9


def check_unit(points: np.ndarray) -> np.ndarray:
    """Validate that the trailing axis holds unit vectors; returns the array."""
    points = np.asarray(points, dtype=float)
    norms = np.linalg.norm(points, axis=-1)
    if not np.all(np.abs(norms - 1.0) <= UNIT_NORM_TOL):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise ValueError(f"points must be unit vectors (max |norm-1| = {worst:.3g})")
    return points


def sample_uniform(n: int, d: int = 2, seed: int | None = None) -> np.ndarray:
    """Draw n points uniformly on S^d, returned as an (n, d+1) array.

    Sampling normalizes standard Gaussian vectors in (d+1)-space, which is
    rotation invariant by construction. Deterministic for a given seed.
    """
    if d < 1:
        raise ValueError(f"dimension d must be >= 1, got {d}")
    if n < 0:
        raise ValueError(f"sample size must be >= 0, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d + 1))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    return g / norms


def geodesic_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Great-circle distance arccos(<x, y>) in [0, pi].

    The inner product is clamped to [-1, 1] so antipodal or coincident inputs
    never produce NaN from roundoff.
    """
    x = check_unit(x)
    y = check_unit(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.arccos(np.clip(np.dot(x, y), -1.0, 1.0)))


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and probability-mass weights integrating harmonics exactly.

    Products of spherical harmonics of degree <= max_exact_degree integrate
    exactly (up to roundoff) against the uniform probability measure.
    """

    nodes: np.ndarray       # (N, 3) unit vectors
    weights: np.ndarray     # (N,), positive, sums to 1
    max_exact_degree: int

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of point values: the grid approximation of the mean."""
        return float(np.dot(self.weights, values))


def quadrature_grid(max_degree: int) -> QuadratureGrid:
    """Gauss-Legendre x equispaced-longitude product grid on S^2.

    max_degree+1 Gauss-Legendre nodes in cos(colatitude) are crossed with
    2*max_degree+1 longitudes. The colatitude rule is exact for polynomial
    degree 2*max_degree+1 and the longitude rule for azimuthal frequencies
    up to 2*max_degree, which together make Gram matrices of harmonics up to
    max_degree exact.
    """
    if max_degree < 0:
        raise ValueError(f"max_degree must be >= 0, got {max_degree}")
    n_t = max_degree + 1
    n_phi = 2 * max_degree + 1
    t, w_t = np.polynomial.legendre.leggauss(n_t)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    x = np.outer(s, np.cos(phi)).ravel()
    y = np.outer(s, np.sin(phi)).ravel()
    z = np.repeat(t, n_phi)
    nodes = np.column_stack([x, y, z])
    # leggauss weights sum to 2 over [-1, 1]; divide by 2 for the probability
    # measure in t and spread uniformly over longitudes.
    weights = np.repeat(w_t / 2.0, n_phi) / n_phi
    return QuadratureGrid(nodes=nodes, weights=weights, max_exact_degree=max_degree)
