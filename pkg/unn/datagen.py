"""
Synthetic uncertainty injection, test query generators and cross-validation.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, List, Optional, Sequence

import numpy as np

from .model import BaseClassifier
from .objects import Dataset, UncertainObject, as_point, norms
from .pdf import DEFAULT_TRUNCATION, DimProduct, Factor, Normal1D, Point1D, Uniform1D
from .utils import mean_std, parallel_map

BORDER_RATIO = 0.1
MAX_BORDER_ATTEMPTS = 10**6
SPREAD_MODES = ("uniform_normal", "gaussian")


@dataclass(frozen=True, eq=False)
class SpreadConfig:
    """
    Spread s and the per-dimension standard deviations of the certain data.
    """

    spread: float
    sigmas: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.spread) or self.spread < 0:
            raise ValueError(f"spread must be >= 0, got {self.spread}")
        sigmas = np.asarray(self.sigmas, dtype=np.float64).reshape(-1)
        if np.any(sigmas < 0):
            raise ValueError("sigmas must be >= 0")
        object.__setattr__(self, "sigmas", sigmas)

    @classmethod
    def from_points(cls, points: np.ndarray, spread: float, seed: int = 0) -> "SpreadConfig":
        return cls(spread, np.std(np.asarray(points, dtype=np.float64), axis=0), seed)


def _check_points(points: np.ndarray, labels: Optional[Sequence[str]] = None) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError(f"Expected a non-empty (n, d) array, got shape {points.shape}")
    if labels is not None and len(points) != len(labels):
        raise ValueError(f"Got {len(points)} points and {len(labels)} labels")
    return points


def _uniform_or_point(x: float, half: float) -> Factor:
    if x - half < x + half:
        return Uniform1D(x - half, x + half)
    return Point1D(x)


def spread_objects(
    points: np.ndarray, labels: Optional[Sequence[str]], cfg: SpreadConfig
) -> List[UncertainObject]:
    """
    Per dimension j draw r in [0.01 s sigma_j, s sigma_j] and make the value
    either a normal (sigma = r, cut at 4r) or uniform on [x - 4r, x + 4r].
    The random stream does not depend on s, so supports grow with s.
    `labels=None` gives unlabeled objects.
    """
    points = _check_points(points, labels)
    if cfg.sigmas.size != points.shape[1]:
        raise ValueError(
            f"Got {cfg.sigmas.size} sigmas for {points.shape[1]}-dimensional points"
        )
    if labels is None:
        labels = [None] * len(points)
    rng = np.random.default_rng(cfg.seed)
    objects = []
    for point, label in zip(points, labels):
        fractions = rng.uniform(size=point.size)
        normal = rng.random(point.size) < 0.5
        if cfg.spread == 0:
            objects.append(UncertainObject.certain(point, label))
            continue
        scales = cfg.spread * cfg.sigmas * (0.01 + 0.99 * fractions)
        factors: List[Factor] = []
        for x, r, is_normal in zip(point, scales, normal):
            if r == 0:
                factors.append(Point1D(x))
            elif is_normal:
                factors.append(Normal1D(x, r, DEFAULT_TRUNCATION))
            else:
                factors.append(_uniform_or_point(x, DEFAULT_TRUNCATION * r))
        objects.append(UncertainObject(DimProduct(factors), label=label))
    return objects


def inject_uncertainty(
    points: np.ndarray, labels: Sequence[str], cfg: SpreadConfig
) -> Dataset:
    return Dataset(spread_objects(points, labels, cfg))


def gaussian_spread_objects(
    points: np.ndarray,
    labels: Optional[Sequence[str]],
    spread: float,
    rng: np.random.Generator,
    sigmas: Optional[np.ndarray] = None,
) -> List[UncertainObject]:
    """
    Per dimension a normal with standard deviation drawn from [0, 2 s sigma_j],
    truncated at 4 standard deviations. sigma_j defaults to the spread of `points`.
    """
    points = _check_points(points, labels)
    if sigmas is None:
        cfg = SpreadConfig.from_points(points, spread)
    else:
        cfg = SpreadConfig(spread, sigmas)
    if cfg.sigmas.size != points.shape[1]:
        raise ValueError(
            f"Got {cfg.sigmas.size} sigmas for {points.shape[1]}-dimensional points"
        )
    if labels is None:
        labels = [None] * len(points)
    objects = []
    for point, label in zip(points, labels):
        stds = rng.uniform(size=point.size) * 2 * cfg.spread * cfg.sigmas
        if cfg.spread == 0:
            objects.append(UncertainObject.certain(point, label))
            continue
        factors = [
            Normal1D(x, std, DEFAULT_TRUNCATION) if std > 0 else Point1D(x)
            for x, std in zip(point, stds)
        ]
        objects.append(UncertainObject(DimProduct(factors), label=label))
    return objects


def inject_gaussian_uncertainty(
    points: np.ndarray,
    labels: Sequence[str],
    spread: float,
    rng: np.random.Generator,
) -> Dataset:
    return Dataset(gaussian_spread_objects(points, labels, spread, rng))


def uncertain_queries(
    points: np.ndarray,
    spread: float,
    sigmas: np.ndarray,
    mode: str = "uniform_normal",
    seed: int = 0,
) -> List[UncertainObject]:
    """
    Unlabeled uncertain test objects centered on certain test points. `sigmas`
    are the per-dimension standard deviations of the training data.
    """
    if mode == "uniform_normal":
        return spread_objects(points, None, SpreadConfig(spread, sigmas, seed))
    if mode == "gaussian":
        return gaussian_spread_objects(
            points, None, spread, np.random.default_rng(seed), sigmas
        )
    raise ValueError(f"Unknown mode '{mode}'. Available: {list(SPREAD_MODES)}")


def midpoint_queries(points: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    (x_i + x_j) / 2 for random pairs of distinct points.
    """
    points = np.asarray(points, dtype=np.float64)
    if len(points) < 2:
        raise ValueError("midpoint queries need at least 2 points")
    first = rng.integers(len(points), size=count)
    second = rng.integers(len(points) - 1, size=count)
    second += second >= first
    return (points[first] + points[second]) / 2


def class_mean_distances(
    q: Sequence[float], points: np.ndarray, labels: Sequence[str], k: int
) -> dict:
    """
    Mean distance from q to its k nearest points of every class.
    """
    labels = np.asarray(labels, dtype=object)
    distances = norms(np.asarray(points, dtype=np.float64) - as_point(q))
    result = {}
    for label in sorted(set(labels)):
        class_distances = np.sort(distances[labels == label])
        if class_distances.size < k:
            raise ValueError(f"Class '{label}' has fewer than k={k} points")
        result[label] = float(class_distances[:k].mean())
    return result


def border_ratio(
    q: Sequence[float], points: np.ndarray, labels: Sequence[str], k: int
) -> float:
    """
    |d_c - d_c'| / max(d_c, d_c') for the two classes with the smallest mean
    k-NN distance.
    """
    nearest = sorted(class_mean_distances(q, points, labels, k).values())[:2]
    largest = max(nearest)
    if largest == 0:
        return 0.0
    return abs(nearest[0] - nearest[1]) / largest


def border_queries(
    points: np.ndarray,
    labels: Sequence[str],
    k: int,
    count: int,
    rng: np.random.Generator,
    max_attempts: int = MAX_BORDER_ATTEMPTS,
    threshold: float = BORDER_RATIO,
) -> np.ndarray:
    """
    Midpoint queries lying near the class border (ratio <= threshold).
    """
    points = _check_points(points, labels)
    accepted = []
    attempts = 0
    while len(accepted) < count:
        if attempts >= max_attempts:
            raise RuntimeError(
                f"Found {len(accepted)} of {count} border queries "
                f"in {attempts} attempts"
            )
        attempts += 1
        q = midpoint_queries(points, 1, rng)[0]
        if border_ratio(q, points, labels, k) <= threshold:
            accepted.append(q)
    logging.info(f"Accepted {count} border queries in {attempts} attempts")
    return np.array(accepted).reshape(count, points.shape[1])


def fold_assignment(dataset: Dataset, folds: int, seed: int) -> np.ndarray:
    """
    Fold of every object: classes are shuffled, concatenated and dealt round-robin.
    Falls back to a plain shuffle when a class has fewer objects than folds.
    """
    rng = np.random.default_rng(seed)
    counts = dataset.counts()
    if min(counts.values()) >= folds:
        order = np.concatenate(
            [rng.permutation(np.flatnonzero(dataset.mask(label))) for label in dataset.labels]
        )
    else:
        logging.warning(
            f"Class sizes {counts} do not fill {folds} folds, using non-stratified folds"
        )
        order = rng.permutation(len(dataset))
    assignment = np.empty(len(dataset), dtype=int)
    assignment[order] = np.arange(len(dataset)) % folds
    return assignment


@dataclass
class CrossValidationReport:
    fold_accuracies: List[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return mean_std(self.fold_accuracies)[0]

    @property
    def std(self) -> float:
        return mean_std(self.fold_accuracies)[1]


def _fold_accuracy(
    dataset: Dataset,
    assignment: np.ndarray,
    classifier_factory: Callable[[Dataset], BaseClassifier],
    fold: int,
) -> float:
    test = np.flatnonzero(assignment == fold)
    classifier = classifier_factory(dataset.subset(np.flatnonzero(assignment != fold)))
    queries = [dataset[i] for i in test]
    results = [classifier.predict(query, int(i)) for i, query in zip(test, queries)]
    scores = [classifier.score(result, query.label) for result, query in zip(results, queries)]
    return float(np.mean(scores))


def ten_fold_cv(
    dataset: Dataset,
    classifier_factory: Callable[[Dataset], BaseClassifier],
    seed: int = 0,
    folds: int = 10,
    jobs: int = 1,
    progress: bool = False,
) -> CrossValidationReport:
    """
    Stratified k-fold accuracy of the classifiers built by `classifier_factory`
    from the training folds. Uncertain test objects go through classify_uncertain.
    """
    if len(dataset) < folds:
        raise ValueError(f"Cross-validation needs at least {folds} objects, got {len(dataset)}")
    assignment = fold_assignment(dataset, folds, seed)
    accuracies = parallel_map(
        partial(_fold_accuracy, dataset, assignment, classifier_factory),
        list(range(folds)),
        jobs=jobs,
        progress=progress,
        desc="folds",
        threads=True,
    )
    return CrossValidationReport(accuracies)
