"""
Reference classifiers: the Monte Carlo most-probable-class oracle, eKNN,
certain KNN, the nearest-distance rule and the naive uncertain-metric NN.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from omegaconf import DictConfig

from .model import (
    BaseClassifier,
    ClassificationResult,
    build_config,
    decide,
    default_samples,
)
from .objects import Dataset, UncertainObject, as_point, norms
from .utils import derive_rng

TestObject = Union[UncertainObject, Sequence[float]]

# Outcomes drawn per vectorized block.
OUTCOME_CHUNK = 1024


@dataclass
class OutcomeSample:
    """
    One outcome of the training set: a point drawn from every object.
    """

    points: np.ndarray
    labels: np.ndarray

    @classmethod
    def draw(cls, dataset: Dataset, rng: np.random.Generator) -> "OutcomeSample":
        points = np.stack([obj.pdf.sample(rng) for obj in dataset])
        return cls(points, dataset.label_array)


def _draw_outcomes(dataset: Dataset, size: int, rng: np.random.Generator) -> np.ndarray:
    # (size, n, d)
    return np.stack([obj.pdf.sample(rng, size) for obj in dataset], axis=1)


def _query_samples(q: TestObject, size: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(q, UncertainObject):
        if q.is_certain:
            return np.tile(q.pdf.at, (size, 1))
        return q.pdf.sample(rng, size)
    return np.tile(as_point(q), (size, 1))


def _vote(nearest_labels: Sequence[str]) -> str:
    """
    Majority label; ties go to the label whose first member is nearest.
    """
    return Counter(nearest_labels).most_common(1)[0][0]


def _check_dataset_dim(q: TestObject, dataset: Dataset) -> None:
    dim = q.dim if isinstance(q, UncertainObject) else as_point(q).size
    if dim != dataset.dim:
        raise ValueError(f"Dimension mismatch: {dim} != {dataset.dim}")


def outcome_votes(
    q: TestObject, dataset: Dataset, k: int, m: int, rng: np.random.Generator
) -> Iterator[str]:
    """
    Certain (2k - 1)-NN label of q in each of m random outcomes of the dataset.
    An uncertain q is redrawn for every outcome.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    neighbors = 2 * k - 1
    if neighbors > len(dataset):
        raise ValueError(f"{neighbors} neighbors requested from {len(dataset)} objects")
    _check_dataset_dim(q, dataset)
    labels = dataset.label_array
    for start in range(0, m, OUTCOME_CHUNK):
        size = min(OUTCOME_CHUNK, m - start)
        outcomes = _draw_outcomes(dataset, size, rng)
        queries = _query_samples(q, size, rng)
        distances = norms(outcomes - queries[:, None, :])
        order = np.argsort(distances, axis=1, kind="stable")[:, :neighbors]
        for row in order:
            yield _vote(labels[row])


def most_probable_class_oracle(
    q: TestObject, dataset: Dataset, k: int, m: int, rng: np.random.Generator
) -> Dict[str, float]:
    """
    Empirical frequency of every class being the (2k - 1)-NN vote over m outcomes;
    the argmax estimates the most probable class.
    """
    counts = Counter(outcome_votes(q, dataset, k, m, rng))
    return {label: counts[label] / m for label in dataset.labels}


def eknn(
    q: TestObject,
    dataset: Dataset,
    k: int,
    m: int,
    rng: np.random.Generator,
    reference: Optional[str] = None,
) -> Tuple[str, float]:
    """
    Majority label over m outcomes and the fraction of outcomes whose label
    matches `reference` (the majority label itself when not given).
    """
    frequencies = most_probable_class_oracle(q, dataset, k, m, rng)
    label, _ = decide(frequencies)
    return label, frequencies.get(reference if reference is not None else label, 0.0)


def certain_knn(
    q: Sequence[float], points: np.ndarray, labels: Sequence[str], k: int
) -> str:
    """
    Majority label among the k nearest points; distance ties keep index order.
    """
    points = np.asarray(points, dtype=np.float64)
    if len(points) == 0:
        raise ValueError("certain_knn needs a non-empty training set")
    if not 1 <= k <= len(points):
        raise ValueError(f"k must lie in [1, {len(points)}], got {k}")
    q = as_point(q)
    if q.size != points.shape[1]:
        raise ValueError(f"Dimension mismatch: {q.size} != {points.shape[1]}")
    labels = np.asarray(labels, dtype=object)
    order = np.argsort(norms(points - q), kind="stable")[:k]
    return _vote(labels[order])


def nearest_distance_rule(
    q: Sequence[float],
    points: np.ndarray,
    labels: Sequence[str],
    k: int,
    classes: Optional[Tuple[str, str]] = None,
) -> str:
    """
    c if the k-th nearest point of class c is strictly closer than the k-th
    nearest of class c', c' otherwise.
    """
    labels = np.asarray(labels, dtype=object)
    if classes is None:
        classes = tuple(sorted(set(labels)))
        if len(classes) != 2:
            raise ValueError(f"Expected 2 classes, got {list(classes)}")
    positive, negative = classes
    distances = norms(np.asarray(points, dtype=np.float64) - as_point(q))
    kth = []
    for label in (positive, negative):
        class_distances = np.sort(distances[labels == label])
        if class_distances.size < k:
            raise ValueError(f"Class '{label}' has fewer than k={k} points")
        kth.append(class_distances[k - 1])
    return positive if kth[0] < kth[1] else negative


def naive_uncertain_nn(
    q: TestObject,
    dataset: Dataset,
    metric: str = "mean",
    n_samples: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> str:
    """
    Label of the training object nearest to q under the distance between means
    (`mean`) or the Monte Carlo expected distance over paired draws (`expected`).
    """
    _check_dataset_dim(q, dataset)
    if metric == "mean":
        center = q.pdf.mean() if isinstance(q, UncertainObject) else as_point(q)
        means = np.stack([obj.pdf.mean() for obj in dataset])
        scores = norms(means - center)
    elif metric == "expected":
        n_samples = n_samples or default_samples(dataset.dim)
        rng = rng if rng is not None else np.random.default_rng()
        scores = np.array(
            [
                norms(obj.pdf.sample(rng, n_samples) - _query_samples(q, n_samples, rng)).mean()
                for obj in dataset
            ]
        )
    else:
        raise ValueError(f"Unknown metric '{metric}'. Available: ['mean', 'expected']")
    return dataset[int(np.argmin(scores))].label


@dataclass
class EknnParams:
    k: int = 1
    m_outcomes: Optional[int] = None  # N for certain, N^2 for uncertain test objects
    seed: int = 0


@dataclass
class OracleParams:
    k: int = 1
    m_outcomes: Optional[int] = 10000
    seed: int = 0


@dataclass
class NaiveParams:
    metric: str = "mean"
    n_samples: Optional[int] = None
    seed: int = 0


class EKNNClassifier(BaseClassifier):
    """
    Certain (2k - 1)-NN applied to sampled outcomes of the training set.
    """

    outcome_averaged = True
    schema = EknnParams

    def __init__(self, cfg: Union[DictConfig, EknnParams, None], dataset: Dataset):
        cfg = build_config(self.schema, cfg)
        if cfg.k < 1:
            raise ValueError(f"k must be >= 1, got {cfg.k}")
        if cfg.m_outcomes is not None and cfg.m_outcomes < 1:
            raise ValueError(f"m_outcomes must be >= 1, got {cfg.m_outcomes}")
        super().__init__(cfg, dataset)

    def outcomes_for(self, certain: bool) -> int:
        if self.cfg.m_outcomes is not None:
            return self.cfg.m_outcomes
        n = default_samples(self.dataset.dim)
        return n if certain else n * n

    def _frequencies(self, q: TestObject, query_index: int, certain: bool):
        frequencies = most_probable_class_oracle(
            q,
            self.dataset,
            self.cfg.k,
            self.outcomes_for(certain),
            derive_rng(self.cfg.seed, query_index),
        )
        label, tie = decide(frequencies)
        return ClassificationResult(label, frequencies, len(self.dataset), tie)

    def classify(self, q: Sequence[float], query_index: int = 0) -> ClassificationResult:
        return self._frequencies(as_point(q), query_index, certain=True)

    def classify_uncertain(
        self, u: UncertainObject, query_index: int = 0
    ) -> ClassificationResult:
        return self._frequencies(u, query_index, certain=u.is_certain)


class OracleClassifier(EKNNClassifier):
    """
    Most probable class estimated from M outcomes; scored by its label.
    """

    outcome_averaged = False
    schema = OracleParams


class NaiveClassifier(BaseClassifier):
    def __init__(self, cfg: Union[DictConfig, NaiveParams, None], dataset: Dataset):
        cfg = build_config(NaiveParams, cfg)
        if cfg.metric not in ("mean", "expected"):
            raise ValueError(
                f"Unknown metric '{cfg.metric}'. Available: ['mean', 'expected']"
            )
        super().__init__(cfg, dataset)

    def _one_hot(self, q: TestObject, query_index: int) -> ClassificationResult:
        label = naive_uncertain_nn(
            q,
            self.dataset,
            metric=self.cfg.metric,
            n_samples=self.cfg.n_samples,
            rng=derive_rng(self.cfg.seed, query_index),
        )
        probs = {other: float(other == label) for other in self.labels}
        return ClassificationResult(label, probs, len(self.dataset))

    def classify(self, q: Sequence[float], query_index: int = 0) -> ClassificationResult:
        return self._one_hot(as_point(q), query_index)

    def classify_uncertain(
        self, u: UncertainObject, query_index: int = 0
    ) -> ClassificationResult:
        return self._one_hot(u, query_index)
