import dataclasses
from typing import Dict, List, Tuple, Type

from .baselines import (
    EknnParams,
    EKNNClassifier,
    NaiveClassifier,
    NaiveParams,
    OracleClassifier,
    OracleParams,
)
from .io_utils import load_dataset, read_points_csv, read_queries, save_dataset
from .model import (
    BaseClassifier,
    ClassificationResult,
    UNNClassifier,
    UnnParams,
    build_config,
    classify_all,
)
from .objects import Dataset, UncertainObject, certain_dataset

_CLASSIFIER_NAMES: Dict[str, Tuple[Type[BaseClassifier], Type, Dict]] = {
    "unn": (UNNClassifier, UnnParams, {}),
    "eknn": (EKNNClassifier, EknnParams, {}),
    "oracle": (OracleClassifier, OracleParams, {}),
    "naive_mean": (NaiveClassifier, NaiveParams, {"metric": "mean"}),
    "naive_expected": (NaiveClassifier, NaiveParams, {"metric": "expected"}),
}
_ALIASES = {"naive": "naive_mean"}


def available_classifiers() -> List[str]:
    return sorted(list(_CLASSIFIER_NAMES) + list(_ALIASES))


def classifier_fields(classifier_name: str) -> List[str]:
    """
    Parameter names accepted by `load_classifier` for this classifier.
    """
    _, schema, _ = _CLASSIFIER_NAMES[_resolve(classifier_name)]
    return [f.name for f in dataclasses.fields(schema)]


def _resolve(classifier_name: str) -> str:
    name = _ALIASES.get(classifier_name, classifier_name)
    if name not in _CLASSIFIER_NAMES:
        raise ValueError(
            f"Classifier '{classifier_name}' not found. "
            f"Available classifier names: {available_classifiers()}"
        )
    return name


def load_classifier(classifier_name: str, dataset: Dataset, **overrides) -> BaseClassifier:
    """
    Build a classifier by name over a training dataset.

    Parameters
    ----------
    classifier_name : str
        One of `available_classifiers()`.
    dataset : Dataset
        Labelled training objects.
    overrides :
        Parameter values replacing the defaults of the classifier's config
        (e.g. k, h, n_samples, m_outcomes, seed). None values are ignored.
    """
    name = _resolve(classifier_name)
    classifier_cls, schema, preset = _CLASSIFIER_NAMES[name]
    unknown = sorted(set(overrides) - set(classifier_fields(name)))
    if unknown:
        raise ValueError(
            f"Unknown parameters {unknown} for classifier '{name}'. "
            f"Available: {classifier_fields(name)}"
        )
    overrides = {key: value for key, value in overrides.items() if value is not None}
    cfg = build_config(schema, preset, **overrides)
    return classifier_cls(cfg, dataset)


__all__ = [
    "ClassificationResult",
    "Dataset",
    "UncertainObject",
    "available_classifiers",
    "certain_dataset",
    "classify_all",
    "load_classifier",
    "load_dataset",
    "read_points_csv",
    "read_queries",
    "save_dataset",
]
