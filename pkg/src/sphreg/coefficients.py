"""Flat, degree-major storage for ragged (ell, m) coefficient sequences."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .harmonics import multiplicity


@lru_cache(maxsize=None)
def level_offsets(d: int, max_degree: int) -> tuple[int, ...]:
    """Start index of each degree block (plus the total) in the flat layout."""
    offsets = [0]
    for ell in range(max_degree + 1):
        offsets.append(offsets[-1] + multiplicity(d, ell))
    return tuple(offsets)


@lru_cache(maxsize=None)
def _degree_for_size(d: int, size: int) -> int:
    total, ell = 0, 0
    while total < size:
        total += multiplicity(d, ell)
        ell += 1
    if total != size:
        raise ValueError(f"{size} values do not fill whole degree blocks for d={d}")
    return ell - 1


@dataclass(frozen=True)
class HarmonicCoefficients:
    """Real coefficients a_{l,m}, 0 <= l <= max_degree, 1 <= m <= M_{d,l}.

    Values are stored flat in degree-major order; the within-level ordering is
    the internal real-basis convention documented in harmonics.
    """

    d: int
    values: np.ndarray
    max_degree: int = field(init=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("coefficient values must be one-dimensional")
        object.__setattr__(self, "values", values)
        if values.size == 0:
            raise ValueError("coefficient sequence must contain at least degree 0")
        object.__setattr__(self, "max_degree", _degree_for_size(self.d, values.size))

    @classmethod
    def zeros(cls, d: int, max_degree: int) -> "HarmonicCoefficients":
        size = level_offsets(d, max_degree)[-1]
        return cls(d=d, values=np.zeros(size))

    @classmethod
    def from_levels(cls, d: int, levels) -> "HarmonicCoefficients":
        parts = [np.asarray(lv, dtype=float).ravel() for lv in levels]
        for ell, part in enumerate(parts):
            if part.size != multiplicity(d, ell):
                raise ValueError(
                    f"level {ell} has {part.size} values, expected {multiplicity(d, ell)}"
                )
        return cls(d=d, values=np.concatenate(parts))

    @property
    def offsets(self) -> tuple[int, ...]:
        return level_offsets(self.d, self.max_degree)

    def level(self, ell: int) -> np.ndarray:
        """View of the degree-ell block."""
        if not 0 <= ell <= self.max_degree:
            raise ValueError(f"degree {ell} outside stored range 0..{self.max_degree}")
        off = self.offsets
        return self.values[off[ell]:off[ell + 1]]

    def level_norms_sq(self) -> np.ndarray:
        """sum_m a_{l,m}^2 per level, length max_degree+1."""
        return np.add.reduceat(self.values**2, np.array(self.offsets[:-1]))

    def norm_sq(self) -> float:
        """Squared l2 norm of all coefficients (= squared L2 norm of the field)."""
        return float(np.dot(self.values, self.values))

    def truncated(self, max_degree: int) -> "HarmonicCoefficients":
        """Copy keeping degrees <= max_degree (no-op copy if already shorter)."""
        if max_degree >= self.max_degree:
            return HarmonicCoefficients(self.d, self.values.copy())
        size = level_offsets(self.d, max_degree)[-1]
        return HarmonicCoefficients(self.d, self.values[:size].copy())

    def padded(self, max_degree: int) -> "HarmonicCoefficients":
        """Copy zero-extended up to max_degree."""
        if max_degree <= self.max_degree:
            return HarmonicCoefficients(self.d, self.values.copy())
        size = level_offsets(self.d, max_degree)[-1]
        values = np.zeros(size)
        values[: self.values.size] = self.values
        return HarmonicCoefficients(self.d, values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HarmonicCoefficients):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.values, other.values)
