from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Union

import numpy as np

from .pdf import Pdf, PointMass


def as_point(coords: Sequence[float]) -> np.ndarray:
    """
    Validate coordinates of a certain object and return them as a float vector.
    """
    point = np.asarray(coords, dtype=np.float64)
    if point.ndim != 1 or point.size == 0:
        raise ValueError(f"A point must be a non-empty vector, got shape {point.shape}")
    if not np.all(np.isfinite(point)):
        raise ValueError(f"A point must have finite coordinates, got {point.tolist()}")
    return point


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"Dimension mismatch: {a.shape[-1]} != {b.shape[-1]}")


def norms(diff: np.ndarray) -> np.ndarray:
    """
    Euclidean norms along the last axis.
    """
    return np.sqrt(np.sum(np.square(diff), axis=-1))


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    """
    Euclidean distance between two points.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dims(a, b)
    return float(norms(a - b))


@dataclass(frozen=True, eq=False)
class SupportBall:
    """
    Ball c(x), r(x) enclosing the support of an uncertain object.
    """

    center: np.ndarray
    radius: float = 0.0

    def __post_init__(self):
        center = as_point(self.center)
        if not np.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"radius must be finite and >= 0, got {self.radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> bool:
        points = np.atleast_2d(points)
        gaps = norms(points - self.center)
        return bool(np.all(gaps <= self.radius + tol))


def support_ball(pdf: Pdf) -> SupportBall:
    """
    Circumscribed ball of the pdf support: atoms are enclosed around their
    centroid, boxes (uniform or truncated) by their half diagonal.
    """
    if isinstance(pdf, PointMass):
        return SupportBall(pdf.at, 0.0)
    if pdf.is_discrete:
        points, _ = pdf.atoms()
        center = points.mean(axis=0)
        radius = float(np.max(norms(points - center)))
        return SupportBall(center, radius)
    low, high = pdf.support_box()
    return SupportBall((low + high) / 2, float(norms(high - low) / 2))


def mindist(x: SupportBall, y: SupportBall) -> float:
    _check_dims(x.center, y.center)
    return max(0.0, distance(x.center, y.center) - (x.radius + y.radius))


def maxdist(x: SupportBall, y: SupportBall) -> float:
    _check_dims(x.center, y.center)
    return distance(x.center, y.center) + (x.radius + y.radius)


@dataclass(frozen=True, eq=False)
class UncertainObject:
    """
    Uncertain object: a pdf, the ball enclosing its support and an optional label.
    """

    pdf: Pdf
    support: Optional[SupportBall] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.support is None:
            object.__setattr__(self, "support", support_ball(self.pdf))
        elif self.support.dim != self.pdf.dim:
            raise ValueError("support ball and pdf dimensions differ")
        if self.label is not None:
            object.__setattr__(self, "label", str(self.label))

    @classmethod
    def certain(cls, coords: Sequence[float], label: Optional[str] = None):
        return cls(PointMass(coords), label=label)

    @property
    def dim(self) -> int:
        return self.pdf.dim

    @property
    def is_certain(self) -> bool:
        return isinstance(self.pdf, PointMass)


Query = Union[np.ndarray, Sequence[float], SupportBall, UncertainObject]


def as_ball(query: Query) -> SupportBall:
    """
    Support ball of a query: a point becomes a zero-radius ball.
    """
    if isinstance(query, SupportBall):
        return query
    if isinstance(query, UncertainObject):
        return query.support
    return SupportBall(as_point(query), 0.0)


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Labelled training set of uncertain objects sharing one dimensionality.
    """

    objects: List[UncertainObject]
    centers: np.ndarray = field(init=False, repr=False)
    radii: np.ndarray = field(init=False, repr=False)
    label_array: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        objects = list(self.objects)
        if not objects:
            raise ValueError("A dataset needs at least one object")
        dims = {obj.dim for obj in objects}
        if len(dims) != 1:
            raise ValueError(f"All objects must share one dimension, got {sorted(dims)}")
        if any(obj.label is None for obj in objects):
            raise ValueError("All training objects must be labelled")
        labels = np.array([obj.label for obj in objects], dtype=object)
        if len(set(labels)) < 2:
            raise ValueError("A dataset needs at least 2 distinct labels")
        centers = np.stack([obj.support.center for obj in objects])
        radii = np.array([obj.support.radius for obj in objects])
        for array in (centers, radii, labels):
            array.setflags(write=False)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "label_array", labels)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def labels(self) -> List[str]:
        return sorted(set(self.label_array))

    def mask(self, labels: Union[str, Sequence[str]]) -> np.ndarray:
        """
        Boolean membership mask of the objects whose label is in `labels`.
        """
        if isinstance(labels, str):
            labels = [labels]
        return np.isin(self.label_array, list(labels))

    def counts(self) -> Dict[str, int]:
        return {label: int(np.sum(self.label_array == label)) for label in self.labels}

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset([self.objects[i] for i in indices])

    def relabel(self, mapping: Dict[Hashable, str]) -> "Dataset":
        return Dataset(
            [
                UncertainObject(obj.pdf, obj.support, mapping.get(obj.label, obj.label))
                for obj in self.objects
            ]
        )

    @property
    def is_certain(self) -> bool:
        return all(obj.is_certain for obj in self.objects)

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self) -> Iterator[UncertainObject]:
        return iter(self.objects)

    def __getitem__(self, index: int) -> UncertainObject:
        return self.objects[index]


def certain_dataset(points: np.ndarray, labels: Sequence[str]) -> Dataset:
    """
    Dataset of point masses.
    """
    points = np.asarray(points, dtype=np.float64)
    if len(points) != len(labels):
        raise ValueError(f"Got {len(points)} points and {len(labels)} labels")
    return Dataset(
        [UncertainObject.certain(point, label) for point, label in zip(points, labels)]
    )
