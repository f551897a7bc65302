import numpy as np
import pytest

from unn.objects import Dataset, UncertainObject, certain_dataset
from unn.pdf import DiscreteMixture, GaussianProduct, PointMass

# unit directions of the bimodal red objects
_DIRECTIONS = [(1.0, 0.0), (0.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (0.6, 0.8), (-0.6, -0.8)]


def bimodal_dataset(n_red: int = 3) -> Dataset:
    """
    q = (0, 0); a blue point at distance 4 and n red objects with half of
    their mass at distance 1 and half at distance 9.
    """
    objects = [UncertainObject(PointMass([0.0, 4.0]), label="blue")]
    for x, y in _DIRECTIONS[:n_red]:
        objects.append(
            UncertainObject(
                DiscreteMixture([[x, y], [9 * x, 9 * y]], [0.5, 0.5]), label="red"
            )
        )
    return Dataset(objects)


def gaussian_line_dataset() -> Dataset:
    """
    Four one-dimensional truncated normals, the first two blue.
    """
    mus = (-2.0, -2.0, 1.9, 2.5)
    sigmas = (0.125, 0.55, 0.125, 0.15)
    labels = ("blue", "blue", "red", "red")
    return Dataset(
        [
            UncertainObject(GaussianProduct([mu], [sigma]), label=label)
            for mu, sigma, label in zip(mus, sigmas, labels)
        ]
    )


def random_discrete_dataset(
    rng: np.random.Generator, n_per_class: int = 6, dim: int = 2, max_atoms: int = 4
) -> Dataset:
    objects = []
    for label, offset in (("a", 0.0), ("b", 1.5)):
        for _ in range(n_per_class):
            center = rng.normal(offset, 1.0, size=dim)
            n_atoms = int(rng.integers(1, max_atoms + 1))
            atoms = center + rng.normal(0.0, 0.4, size=(n_atoms, dim))
            weights = rng.uniform(0.1, 1.0, size=n_atoms)
            objects.append(
                UncertainObject(DiscreteMixture(atoms, weights / weights.sum()), label=label)
            )
    return Dataset(objects)


def random_certain_points(rng: np.random.Generator, n: int, dim: int):
    points = rng.normal(size=(n, dim))
    labels = np.where(rng.random(n) < 0.5, "a", "b")
    labels[:2] = ["a", "b"]
    return points, list(labels)


@pytest.fixture
def bimodal():
    return bimodal_dataset


@pytest.fixture
def gaussian_line():
    return gaussian_line_dataset()


@pytest.fixture
def random_discrete():
    return random_discrete_dataset


@pytest.fixture
def two_blobs():
    """
    Two well separated Gaussian blobs of certain points in the plane.
    """
    rng = np.random.default_rng(7)
    points = np.concatenate(
        [rng.normal([0.0, 0.0], 1.0, size=(40, 2)), rng.normal([4.0, 0.0], 1.0, size=(40, 2))]
    )
    labels = ["a"] * 40 + ["b"] * 40
    return points, labels


@pytest.fixture
def line_points():
    points = np.array([[0.0], [1.0], [3.0], [7.0], [8.0], [12.0]])
    labels = ["a", "a", "b", "b", "c", "c"]
    return certain_dataset(points, labels)
