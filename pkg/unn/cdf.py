"""
Cumulative distance distributions p_i(R) = Pr(d(q, x_i) <= R) of single objects,
as h-slot histograms (Monte Carlo) or exactly for discrete pdfs.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .objects import SupportBall, UncertainObject, as_point, maxdist, mindist, norms


@dataclass(frozen=True, eq=False)
class RadiusGrid:
    """
    h radii R_l = r_min + l * (r_max - r_min) / h, l = 1..h.
    """

    r_min: float
    r_max: float
    h: int

    def __post_init__(self):
        if self.h < 1:
            raise ValueError(f"h must be >= 1, got {self.h}")
        if not (np.isfinite(self.r_min) and np.isfinite(self.r_max)):
            raise ValueError("grid bounds must be finite")
        if self.r_min > self.r_max:
            raise ValueError(f"r_min {self.r_min} > r_max {self.r_max}")

    @property
    def delta(self) -> float:
        return (self.r_max - self.r_min) / self.h

    @property
    def radii(self) -> np.ndarray:
        radii = self.r_min + np.arange(1, self.h + 1) * self.delta
        radii[-1] = self.r_max
        return radii


@dataclass(frozen=True, eq=False)
class DistanceCdf:
    """
    Histogram of a cumulative distribution: slot l holds the value at R_l.
    """

    grid: RadiusGrid
    slots: np.ndarray

    def __post_init__(self):
        slots = np.asarray(self.slots, dtype=np.float64)
        if slots.shape != (self.grid.h,):
            raise ValueError(f"Expected {self.grid.h} slots, got shape {slots.shape}")
        if np.any(slots < 0) or np.any(slots > 1):
            raise ValueError("slot values must lie in [0, 1]")
        if np.any(np.diff(slots) < 0):
            raise ValueError("slot values must be non-decreasing")
        slots.setflags(write=False)
        object.__setattr__(self, "slots", slots)

    def __len__(self) -> int:
        return self.grid.h


def _distance_range(q: np.ndarray, x: UncertainObject):
    ball = SupportBall(q, 0.0)
    return mindist(ball, x.support), maxdist(ball, x.support)


def sample_distances(
    q: Sequence[float], x: UncertainObject, n_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """
    Sorted distances from q to n_samples draws of x, clamped into [mindist, maxdist].
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    q = as_point(q)
    if q.size != x.dim:
        raise ValueError(f"Dimension mismatch: {q.size} != {x.dim}")
    low, high = _distance_range(q, x)
    samples = x.pdf.sample(rng, n_samples)
    distances = np.clip(norms(samples - q), low, high)
    distances.sort()
    return distances


def empirical_cdf(sorted_distances: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """
    Fraction of distances <= each radius.
    """
    counts = np.searchsorted(sorted_distances, radii, side="right")
    return counts / len(sorted_distances)


def estimate_object_cdf(
    q: Sequence[float],
    x: UncertainObject,
    grid: RadiusGrid,
    n_samples: int,
    rng: np.random.Generator,
) -> DistanceCdf:
    """
    Monte Carlo histogram of Pr(d(q, x) <= R_l): one pass of n_samples draws
    fills every slot.
    """
    distances = sample_distances(q, x, n_samples, rng)
    return DistanceCdf(grid, empirical_cdf(distances, grid.radii))


def exact_cdf_values(
    q: Sequence[float], x: UncertainObject, radii: np.ndarray
) -> np.ndarray:
    """
    Exact Pr(d(q, x) <= R) of a discrete object for every R in `radii`.
    """
    if not x.pdf.is_discrete:
        raise ValueError(
            f"Exact CDFs need a discrete pdf, got {type(x.pdf).__name__}"
        )
    q = as_point(q)
    if q.size != x.dim:
        raise ValueError(f"Dimension mismatch: {q.size} != {x.dim}")
    points, weights = x.pdf.atoms()
    low, high = _distance_range(q, x)
    distances = np.clip(norms(points - q), low, high)
    order = np.argsort(distances, kind="stable")
    mass = np.minimum(np.cumsum(weights[order]), 1.0)
    counts = np.searchsorted(distances[order], np.asarray(radii), side="right")
    return np.where(counts > 0, mass[np.maximum(counts - 1, 0)], 0.0)


def exact_object_cdf(q: Sequence[float], x: UncertainObject, radius: float) -> float:
    """
    Sum of atom weights within `radius` of q.
    """
    return float(exact_cdf_values(q, x, np.array([radius]))[0])


def exact_histogram(
    q: Sequence[float], x: UncertainObject, grid: RadiusGrid
) -> DistanceCdf:
    return DistanceCdf(grid, exact_cdf_values(q, x, grid.radii))


def atom_distances(q: Sequence[float], x: UncertainObject) -> np.ndarray:
    """
    Distances from q to the atoms of a discrete object.
    """
    q = as_point(q)
    points, _ = x.pdf.atoms()
    low, high = _distance_range(q, x)
    return np.clip(norms(points - q), low, high)
