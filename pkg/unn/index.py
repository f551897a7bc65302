"""
Candidate search for the UNN rule: the k-th smallest maxdist of a class
(a nearest neighbor query on maxdist) and the objects whose mindist does not
exceed a radius (a range query on mindist). `PivotTable` answers both with
pivot lower bounds |d(c(q), p) - d(p, c(x))| <= d(c(q), c(x)).
"""

import heapq
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from .objects import Dataset, SupportBall, norms

# Bounds are compared with this relative slack so that rounding in the pivot
# distances never prunes an object sitting exactly on a threshold.
_BOUND_SLACK = 1e-9


def _over(bound: np.ndarray, threshold: float) -> np.ndarray:
    return bound > threshold + _BOUND_SLACK * max(1.0, abs(threshold))


class CandidateIndex(ABC):
    """
    Base class of the candidate providers used by the classifier.
    """

    def __init__(self, dataset: Dataset):
        self.dataset = dataset

    def _members(self, members: Optional[np.ndarray]) -> np.ndarray:
        if members is None:
            return np.ones(len(self.dataset), dtype=bool)
        return np.asarray(members, dtype=bool)

    def _center_distances(self, ball: SupportBall, indices: np.ndarray) -> np.ndarray:
        if ball.dim != self.dataset.dim:
            raise ValueError(f"Dimension mismatch: {ball.dim} != {self.dataset.dim}")
        return norms(self.dataset.centers[indices] - ball.center)

    def mindists(self, ball: SupportBall, indices: np.ndarray) -> np.ndarray:
        reach = self.dataset.radii[indices] + ball.radius
        return np.maximum(0.0, self._center_distances(ball, indices) - reach)

    def maxdists(self, ball: SupportBall, indices: np.ndarray) -> np.ndarray:
        reach = self.dataset.radii[indices] + ball.radius
        return self._center_distances(ball, indices) + reach

    def min_mindist(self, ball: SupportBall, members: Optional[np.ndarray] = None) -> float:
        """
        Smallest mindist between the query and the member objects.
        """
        indices = np.flatnonzero(self._members(members))
        if indices.size == 0:
            return np.inf
        return float(self.mindists(ball, indices).min())

    @abstractmethod
    def knn_maxdist(
        self, ball: SupportBall, members: np.ndarray, k: int
    ) -> Tuple[float, np.ndarray, int]:
        """
        k-th smallest maxdist over the member objects, the k witnesses and the
        number of objects pruned. Returns +inf and no witnesses when fewer than
        k objects are members.
        """

    @abstractmethod
    def range_mindist(
        self, ball: SupportBall, r_max: float, members: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, int]:
        """
        Sorted indices of the member objects with mindist <= r_max and the
        number of objects pruned.
        """


class LinearScan(CandidateIndex):
    def knn_maxdist(
        self, ball: SupportBall, members: np.ndarray, k: int
    ) -> Tuple[float, np.ndarray, int]:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        indices = np.flatnonzero(self._members(members))
        if indices.size < k:
            return np.inf, np.empty(0, dtype=int), 0
        values = self.maxdists(ball, indices)
        order = np.argsort(values, kind="stable")[:k]
        return float(values[order[-1]]), np.sort(indices[order]), 0

    def range_mindist(
        self, ball: SupportBall, r_max: float, members: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, int]:
        indices = np.flatnonzero(self._members(members))
        return indices[self.mindists(ball, indices) <= r_max], 0


class PivotTable(LinearScan):
    """
    Pivot table over the support centers of the training objects.
    """

    def __init__(self, dataset: Dataset, num_pivots: int = 16, seed: int = 0):
        super().__init__(dataset)
        if num_pivots < 0:
            raise ValueError(f"num_pivots must be >= 0, got {num_pivots}")
        if num_pivots > len(dataset):
            raise ValueError(
                f"Cannot draw {num_pivots} pivots from {len(dataset)} objects"
            )
        rng = np.random.default_rng(seed)
        self.pivot_indices = np.sort(
            rng.choice(len(dataset), size=num_pivots, replace=False)
        )
        self.pivots = dataset.centers[self.pivot_indices]
        # dists[i, j] = d(c(x_i), p_j)
        self.dists = norms(dataset.centers[:, None, :] - self.pivots[None, :, :])

    @property
    def num_pivots(self) -> int:
        return len(self.pivot_indices)

    def center_lower_bounds(self, ball: SupportBall) -> np.ndarray:
        """
        max_j |d(c(q), p_j) - d(p_j, c(x_i))| for every object i.
        """
        if self.num_pivots == 0:
            return np.zeros(len(self.dataset))
        query_dists = norms(self.pivots - ball.center)
        return np.max(np.abs(self.dists - query_dists[None, :]), axis=1)

    def knn_maxdist(
        self, ball: SupportBall, members: np.ndarray, k: int
    ) -> Tuple[float, np.ndarray, int]:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        indices = np.flatnonzero(self._members(members))
        if indices.size < k:
            return np.inf, np.empty(0, dtype=int), 0
        bounds = (
            self.center_lower_bounds(ball)[indices]
            + self.dataset.radii[indices]
            + ball.radius
        )
        order = np.argsort(bounds, kind="stable")
        best = []  # max-heap of (-maxdist, -index)
        visited = 0
        for position in order:
            if len(best) == k and _over(bounds[position], -best[0][0]):
                break
            i = indices[position]
            value = float(self.maxdists(ball, np.array([i]))[0])
            visited += 1
            if len(best) < k:
                heapq.heappush(best, (-value, -i))
            elif (value, i) < (-best[0][0], -best[0][1]):
                heapq.heapreplace(best, (-value, -i))
        witnesses = np.array(sorted(-i for _, i in best), dtype=int)
        return -best[0][0], witnesses, int(indices.size - visited)

    def range_mindist(
        self, ball: SupportBall, r_max: float, members: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, int]:
        indices = np.flatnonzero(self._members(members))
        bounds = (
            self.center_lower_bounds(ball)[indices]
            - self.dataset.radii[indices]
            - ball.radius
        )
        keep = ~_over(bounds, r_max)
        survivors = indices[keep]
        found, _ = super().range_mindist(
            ball, r_max, np.isin(np.arange(len(self.dataset)), survivors)
        )
        return found, int(indices.size - survivors.size)


def build_index(dataset: Dataset, num_pivots: int = 0, seed: int = 0) -> CandidateIndex:
    """
    Linear scan without pivots, pivot table otherwise.
    """
    if num_pivots == 0:
        return LinearScan(dataset)
    return PivotTable(dataset, num_pivots=num_pivots, seed=seed)
