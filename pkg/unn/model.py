import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, is_dataclass
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, Union

import hydra
import numpy as np
from omegaconf import DictConfig, OmegaConf

from .cdf import RadiusGrid, atom_distances, estimate_object_cdf, exact_cdf_values
from .class_distance import nearest_class_probability
from .objects import (
    Dataset,
    Query,
    UncertainObject,
    as_ball,
    as_point,
    maxdist,
)
from .utils import QUERY_STREAM, derive_rng, parallel_map

Labels = Union[str, Sequence[str]]


def default_samples(dim: int) -> int:
    """
    Monte Carlo sample count N = 100 * 2^d.
    """
    return 100 * 2**dim


@dataclass
class UnnParams:
    k: int = 1
    h: int = 100
    n_samples: Optional[int] = None  # 100 * 2^d when None
    seed: int = 0
    exact: Optional[bool] = None  # None: exact CDFs whenever all candidates are discrete
    index: Dict[str, Any] = field(
        default_factory=lambda: {
            "_target_": "unn.index.build_index",
            "num_pivots": 0,
            "seed": 0,
        }
    )


def build_config(
    schema: Type, cfg: Optional[Union[DictConfig, Dict[str, Any], Any]] = None, **overrides
) -> DictConfig:
    """
    Merge `cfg` and keyword overrides into the structured config of `schema`.
    Unknown keys are rejected.
    """
    merged = OmegaConf.structured(schema)
    if cfg is not None:
        if is_dataclass(cfg):
            cfg = OmegaConf.structured(cfg)
        merged = OmegaConf.merge(merged, cfg)
    if overrides:
        merged = OmegaConf.merge(merged, overrides)
    return merged


@dataclass
class ClassificationResult:
    label: str
    class_probs: Dict[str, float]
    candidates_examined: int = 0
    tie: bool = False


@dataclass
class CandidateSet:
    """
    Integration bounds and the objects that can affect the class probabilities.
    """

    r_min: float
    r_max: float
    radius_positive: float
    radius_negative: float
    positive: np.ndarray
    negative: np.ndarray
    pruned: int = 0

    @property
    def size(self) -> int:
        return len(self.positive) + len(self.negative)


def decide(class_probs: Dict[str, float]) -> Tuple[str, bool]:
    """
    Label with the largest probability; ties go to the smallest label.
    """
    best = max(class_probs.values())
    winners = [label for label in sorted(class_probs) if class_probs[label] == best]
    return winners[0], len(winners) > 1


def radius_for_class(q: Query, class_objects: Sequence[UncertainObject], k: int) -> float:
    """
    k-th smallest maxdist between q and the class objects, +inf for classes
    with fewer than k objects.
    """
    ball = as_ball(q)
    values = sorted(maxdist(ball, obj.support) for obj in class_objects)
    return values[k - 1] if len(values) >= k else math.inf


class BaseClassifier(ABC):
    """
    Common surface of the UNN classifier and the baselines.
    """

    # Scored by the probability of the true label rather than by the label.
    outcome_averaged = False

    def __init__(self, cfg: DictConfig, dataset: Dataset):
        self.cfg = cfg
        self.dataset = dataset

    @property
    def labels(self) -> List[str]:
        return self.dataset.labels

    @abstractmethod
    def classify(self, q: Sequence[float], query_index: int = 0) -> ClassificationResult:
        pass

    @abstractmethod
    def classify_uncertain(
        self, u: UncertainObject, query_index: int = 0
    ) -> ClassificationResult:
        pass

    def predict(
        self, query: Union[UncertainObject, Sequence[float]], query_index: int = 0
    ) -> ClassificationResult:
        """
        Classify a certain point or an uncertain object.
        """
        if isinstance(query, UncertainObject):
            if query.is_certain:
                return self.classify(query.pdf.at, query_index)
            return self.classify_uncertain(query, query_index)
        return self.classify(query, query_index)

    def score(self, result: ClassificationResult, label: str) -> float:
        if self.outcome_averaged:
            return float(result.class_probs.get(label, 0.0))
        return float(result.label == label)

    def _result(self, class_probs: Dict[str, float], examined: int) -> ClassificationResult:
        label, tie = decide(class_probs)
        return ClassificationResult(label, class_probs, examined, tie)


class UNNClassifier(BaseClassifier):
    """
    Uncertain nearest neighbor classifier: returns the class that most probably
    provides the k-th nearest neighbor of the test object.
    """

    def __init__(self, cfg: Union[DictConfig, UnnParams, None], dataset: Dataset):
        cfg = build_config(UnnParams, cfg)
        if cfg.n_samples is None:
            cfg.n_samples = default_samples(dataset.dim)
        if cfg.k < 1:
            raise ValueError(f"k must be >= 1, got {cfg.k}")
        if cfg.h < 2:
            raise ValueError(f"h must be >= 2, got {cfg.h}")
        if cfg.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {cfg.n_samples}")
        super().__init__(cfg, dataset)
        self.index = hydra.utils.instantiate(self.cfg.index, _partial_=True)(dataset)
        self._discrete = np.array([obj.pdf.is_discrete for obj in dataset])

    def _masks(self, positive: Labels, negative: Optional[Labels]):
        known = set(self.labels)
        requested = [positive] if isinstance(positive, str) else list(positive)
        if negative is not None:
            requested += [negative] if isinstance(negative, str) else list(negative)
        missing = sorted(set(requested) - known)
        if missing:
            raise ValueError(f"Unknown class labels {missing}. Available: {sorted(known)}")
        positive_mask = self.dataset.mask(positive)
        if negative is None:
            return positive_mask, ~positive_mask
        return positive_mask, self.dataset.mask(negative) & ~positive_mask

    def build_candidate_set(
        self, q: Query, positive: Labels, negative: Optional[Labels] = None
    ) -> CandidateSet:
        """
        R_max^q (the smaller k-th maxdist radius of the two classes), R_min^q (the
        smallest mindist) and the objects with mindist <= R_max^q per class.
        `negative=None` pits `positive` against all other classes.
        """
        k = self.cfg.k
        ball = as_ball(q)
        positive_mask, negative_mask = self._masks(positive, negative)
        radius_positive, _, pruned_positive = self.index.knn_maxdist(ball, positive_mask, k)
        radius_negative, _, pruned_negative = self.index.knn_maxdist(ball, negative_mask, k)
        if math.isinf(radius_positive) and math.isinf(radius_negative):
            raise ValueError(f"Both classes have fewer than k={k} objects")
        r_max = min(radius_positive, radius_negative)
        members = positive_mask | negative_mask
        r_min = self.index.min_mindist(ball, members)
        candidates, pruned = self.index.range_mindist(ball, r_max, members)
        return CandidateSet(
            r_min=r_min,
            r_max=r_max,
            radius_positive=radius_positive,
            radius_negative=radius_negative,
            positive=candidates[positive_mask[candidates]],
            negative=candidates[negative_mask[candidates]],
            pruned=pruned_positive + pruned_negative + pruned,
        )

    def _use_exact(self, candidates: np.ndarray) -> bool:
        discrete = bool(self._discrete[candidates].all())
        if self.cfg.exact is None:
            return discrete
        if self.cfg.exact and not discrete:
            raise ValueError("exact=True requires every candidate object to be discrete")
        return bool(self.cfg.exact)

    def exact_breakpoints(
        self, q: np.ndarray, candidates: np.ndarray, r_min: float, r_max: float
    ) -> np.ndarray:
        """
        Distinct atom distances inside [r_min, r_max], closed by r_max: the jumps of
        every step CDF involved, so the discretized integral is exact on them.
        """
        distances = np.concatenate(
            [atom_distances(q, self.dataset[i]) for i in candidates]
        )
        inside = distances[(distances >= r_min) & (distances <= r_max)]
        return np.unique(np.append(inside, r_max))

    def slot_probabilities(
        self, q: np.ndarray, candidates: np.ndarray, r_min: float, r_max: float, keys=(0, 0)
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Radii and the (n_q, L) matrix of p_i(R_l) for the candidate objects.
        """
        if self._use_exact(candidates):
            radii = self.exact_breakpoints(q, candidates, r_min, r_max)
            rows = [exact_cdf_values(q, self.dataset[i], radii) for i in candidates]
        else:
            grid = RadiusGrid(r_min, r_max, self.cfg.h)
            radii = grid.radii
            rows = [
                estimate_object_cdf(
                    q,
                    self.dataset[i],
                    grid,
                    self.cfg.n_samples,
                    derive_rng(self.cfg.seed, *keys, i),
                ).slots
                for i in candidates
            ]
        return radii, np.array(rows).reshape(len(candidates), len(radii))

    def _pair_probability(
        self, q: np.ndarray, positive: Labels, negative: Optional[Labels], keys
    ) -> Tuple[float, CandidateSet]:
        k = self.cfg.k
        candidates = self.build_candidate_set(q, positive, negative)
        n_positive, n_negative = len(candidates.positive), len(candidates.negative)
        if n_positive < k and n_negative < k:
            raise ValueError(f"Both classes have fewer than k={k} candidates")
        if n_positive < k:
            return 0.0, candidates
        if n_negative < k:
            return 1.0, candidates
        if candidates.r_max <= candidates.r_min:
            # Empty integration interval: the class reaching r_max wins outright.
            positive_hit = candidates.radius_positive <= candidates.r_max
            negative_hit = candidates.radius_negative <= candidates.r_max
            if positive_hit and negative_hit:
                return 0.5, candidates
            return (1.0 if positive_hit else 0.0), candidates

        indices = np.concatenate([candidates.positive, candidates.negative])
        _, slots = self.slot_probabilities(
            q, indices, candidates.r_min, candidates.r_max, keys
        )
        probability = nearest_class_probability(
            slots[:n_positive], slots[n_positive:], k, midpoint=not self._use_exact(indices)
        )
        return probability, candidates

    def nn_class_probability(
        self,
        q: Sequence[float],
        positive: Labels,
        negative: Optional[Labels] = None,
        query_index: int = 0,
    ) -> float:
        """
        Pr(D(q, positive) < D(q, negative)) for a certain test object.
        """
        probability, _ = self._pair_probability(
            as_point(q), positive, negative, (query_index, 0)
        )
        return probability

    def _class_probabilities(self, q: np.ndarray, keys) -> Tuple[Dict[str, float], int]:
        labels = self.labels
        if len(labels) == 2:
            positive, negative = labels
            probability, candidates = self._pair_probability(q, positive, negative, keys)
            return {positive: probability, negative: 1.0 - probability}, candidates.size
        # one-against-all
        probs: Dict[str, float] = {}
        examined = set()
        for label in labels:
            probs[label], candidates = self._pair_probability(q, label, None, keys)
            examined.update(candidates.positive.tolist())
            examined.update(candidates.negative.tolist())
        return probs, len(examined)

    def classify(self, q: Sequence[float], query_index: int = 0) -> ClassificationResult:
        probs, examined = self._class_probabilities(as_point(q), (query_index, 0))
        return self._result(probs, examined)

    def classify_uncertain(
        self, u: UncertainObject, query_index: int = 0
    ) -> ClassificationResult:
        """
        Average of the certain class probabilities over N draws of the test object.
        """
        if u.dim != self.dataset.dim:
            raise ValueError(f"Dimension mismatch: {u.dim} != {self.dataset.dim}")
        if u.is_certain:
            return self.classify(u.pdf.at, query_index)
        n = self.cfg.n_samples
        samples = u.pdf.sample(derive_rng(self.cfg.seed, query_index, QUERY_STREAM), n)
        totals = dict.fromkeys(self.labels, 0.0)
        examined = 0
        for i, q in enumerate(samples, start=1):
            probs, size = self._class_probabilities(q, (query_index, i))
            for label, probability in probs.items():
                totals[label] += probability
            examined = max(examined, size)
        return self._result({label: total / n for label, total in totals.items()}, examined)


def _predict(classifier: BaseClassifier, item) -> ClassificationResult:
    query_index, query = item
    return classifier.predict(query, query_index)


def classify_all(
    classifier: BaseClassifier,
    queries: Sequence[Union[UncertainObject, Sequence[float]]],
    jobs: int = 1,
    progress: bool = False,
    first_index: int = 0,
) -> List[ClassificationResult]:
    """
    Classify a batch of queries; results follow input order whatever `jobs` is.
    """
    items = list(enumerate(queries, start=first_index))
    return parallel_map(
        partial(_predict, classifier), items, jobs=jobs, progress=progress, desc="classify"
    )
