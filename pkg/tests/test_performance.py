import time

import numpy as np
import pytest

from unn.model import UNNClassifier, UnnParams
from unn.objects import Dataset, UncertainObject
from unn.pdf import GaussianProduct, UniformBox

pytestmark = pytest.mark.slow


def local_dataset(rng, n=30):
    objects = []
    for i in range(n):
        center = rng.uniform(-1.0, 1.0, size=2)
        objects.append(
            UncertainObject(GaussianProduct(center, [0.2, 0.2]), label="a" if i % 2 else "b")
        )
    return Dataset(objects)


def timed(classifier, queries):
    start = time.perf_counter()
    for i, q in enumerate(queries):
        classifier.classify(q, i)
    return time.perf_counter() - start


def best_of(classifier, queries, trials=3):
    return min(timed(classifier, queries) for _ in range(trials))


def test_time_grows_linearly_with_samples():
    rng = np.random.default_rng(0)
    dataset = local_dataset(rng)
    queries = rng.uniform(-0.5, 0.5, size=(20, 2))
    small = best_of(UNNClassifier(UnnParams(n_samples=4000), dataset), queries)
    large = best_of(UNNClassifier(UnnParams(n_samples=8000), dataset), queries)
    assert 1.6 <= large / small <= 2.6


def test_far_objects_do_not_slow_queries():
    rng = np.random.default_rng(1)
    dataset = local_dataset(rng)
    far = [
        UncertainObject(UniformBox(center - 0.1, center + 0.1), label="a" if i % 2 else "b")
        for i, center in enumerate(rng.uniform(100.0, 200.0, size=(300, 2)))
    ]
    padded = Dataset(list(dataset) + far)
    queries = rng.uniform(-0.5, 0.5, size=(20, 2))
    base = best_of(UNNClassifier(UnnParams(n_samples=4000), dataset), queries)
    grown = best_of(UNNClassifier(UnnParams(n_samples=4000), padded), queries)
    assert grown < 1.15 * base
