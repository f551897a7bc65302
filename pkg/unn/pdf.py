from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type

import numpy as np

DEFAULT_TRUNCATION = 4.0
WEIGHT_TOLERANCE = 1e-9

_PDF_TYPES: Dict[str, Type["Pdf"]] = {}
_FACTOR_TYPES: Dict[str, Type["Factor"]] = {}


def _as_vector(values: Sequence[float], name: str) -> np.ndarray:
    vector = np.array(values, dtype=np.float64).reshape(-1)
    if vector.size == 0:
        raise ValueError(f"{name} must have at least one component")
    if not np.all(np.isfinite(vector)):
        raise ValueError(f"{name} must be finite, got {vector.tolist()}")
    vector.setflags(write=False)
    return vector


def register_pdf(type_name: str) -> Callable[[Type["Pdf"]], Type["Pdf"]]:
    """
    Register a pdf class under the `type` used in JSON-lines records.
    """

    def wrapper(cls: Type["Pdf"]) -> Type["Pdf"]:
        cls.type_name = type_name
        _PDF_TYPES[type_name] = cls
        return cls

    return wrapper


def _register_factor(type_name: str):
    def wrapper(cls):
        cls.type_name = type_name
        _FACTOR_TYPES[type_name] = cls
        return cls

    return wrapper


def truncated_normal(
    rng: np.random.Generator,
    mu: np.ndarray,
    sigma: np.ndarray,
    truncation: float,
    size: int,
) -> np.ndarray:
    """
    Draw `size` rows from a product of normals cut at +-truncation*sigma by rejection.
    """
    mu = np.atleast_1d(mu)
    sigma = np.atleast_1d(sigma)
    z = rng.standard_normal((size, mu.size))
    rejected = np.abs(z) > truncation
    while rejected.any():
        z[rejected] = rng.standard_normal(int(rejected.sum()))
        rejected = np.abs(z) > truncation
    return mu + sigma * z


class Pdf(ABC):
    """
    Probability density over d-dimensional Euclidean space.
    Instances are immutable; sampling takes an explicit generator.
    """

    type_name: str = ""

    @property
    @abstractmethod
    def dim(self) -> int:
        pass

    @abstractmethod
    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        pass

    @abstractmethod
    def mean(self) -> np.ndarray:
        pass

    @abstractmethod
    def _params(self) -> Dict[str, Any]:
        pass

    @property
    def is_discrete(self) -> bool:
        return False

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        raise ValueError(f"{type(self).__name__} is not a discrete pdf")

    def support_box(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """
        Axis-aligned box enclosing the (truncated) support, None for discrete pdfs.
        """
        return None

    def sample(
        self, rng: np.random.Generator, size: Optional[int] = None
    ) -> np.ndarray:
        """
        One point of shape (d,) when `size` is None, else an array of shape (size, d).
        """
        if size is None:
            return self._draw(rng, 1)[0]
        if size < 0:
            raise ValueError(f"size must be non-negative, got {size}")
        return self._draw(rng, size)

    def to_record(self) -> Dict[str, Any]:
        return {"type": self.type_name, **self._params()}

    def __repr__(self) -> str:
        params = ", ".join(f"{key}={value}" for key, value in self._params().items())
        return f"{type(self).__name__}({params})"


@register_pdf("point")
class PointMass(Pdf):
    """
    Dirac delta: a certain object.
    """

    def __init__(self, at: Sequence[float]):
        self.at = _as_vector(at, "at")

    @property
    def dim(self) -> int:
        return self.at.size

    @property
    def is_discrete(self) -> bool:
        return True

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.at[None, :], np.ones(1)

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.tile(self.at, (size, 1))

    def mean(self) -> np.ndarray:
        return self.at

    def _params(self) -> Dict[str, Any]:
        return {"at": self.at.tolist()}


@register_pdf("mixture")
class DiscreteMixture(Pdf):
    """
    Finite set of weighted atoms.
    """

    def __init__(self, atoms: Sequence[Sequence[float]], weights: Sequence[float]):
        points = np.array(atoms, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] == 0 or points.shape[1] == 0:
            raise ValueError("atoms must be a non-empty list of points")
        if not np.all(np.isfinite(points)):
            raise ValueError("atoms must be finite")
        weights = np.array(weights, dtype=np.float64).reshape(-1)
        if weights.size != points.shape[0]:
            raise ValueError(
                f"Got {weights.size} weights for {points.shape[0]} atoms"
            )
        if np.any(weights <= 0):
            raise ValueError("mixture weights must be positive")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValueError(f"mixture weights sum to {total}, expected 1")
        points.setflags(write=False)
        weights.setflags(write=False)
        self._points = points
        self.weights = weights

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def is_discrete(self) -> bool:
        return True

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._points, self.weights

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        index = rng.choice(len(self.weights), size=size, p=self.weights)
        return self._points[index]

    def mean(self) -> np.ndarray:
        return self.weights @ self._points

    def _params(self) -> Dict[str, Any]:
        return {"atoms": self._points.tolist(), "weights": self.weights.tolist()}


@register_pdf("gauss")
class GaussianProduct(Pdf):
    """
    Axis-aligned normal truncated at +-truncation*sigma in every dimension.
    """

    def __init__(
        self,
        mean: Sequence[float],
        sigmas: Sequence[float],
        truncation: float = DEFAULT_TRUNCATION,
    ):
        self._mean = _as_vector(mean, "mean")
        self.sigmas = _as_vector(sigmas, "sigmas")
        if self.sigmas.size != self._mean.size:
            raise ValueError("mean and sigmas must have the same length")
        if np.any(self.sigmas <= 0):
            raise ValueError("sigmas must be positive")
        if truncation <= 0:
            raise ValueError("truncation must be positive")
        self.truncation = float(truncation)

    @property
    def dim(self) -> int:
        return self._mean.size

    def support_box(self) -> Tuple[np.ndarray, np.ndarray]:
        half = self.truncation * self.sigmas
        return self._mean - half, self._mean + half

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return truncated_normal(rng, self._mean, self.sigmas, self.truncation, size)

    def mean(self) -> np.ndarray:
        return self._mean

    def _params(self) -> Dict[str, Any]:
        return {
            "mean": self._mean.tolist(),
            "sigmas": self.sigmas.tolist(),
            "truncation": self.truncation,
        }


@register_pdf("box")
class UniformBox(Pdf):
    def __init__(self, low: Sequence[float], high: Sequence[float]):
        self.low = _as_vector(low, "low")
        self.high = _as_vector(high, "high")
        if self.low.size != self.high.size:
            raise ValueError("low and high must have the same length")
        if np.any(self.low >= self.high):
            raise ValueError("UniformBox requires low < high componentwise")

    @property
    def dim(self) -> int:
        return self.low.size

    def support_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.low, self.high

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(size, self.dim))

    def mean(self) -> np.ndarray:
        return (self.low + self.high) / 2

    def _params(self) -> Dict[str, Any]:
        return {"low": self.low.tolist(), "high": self.high.tolist()}


class Factor(ABC):
    """
    One-dimensional pdf used as a DimProduct factor.
    """

    type_name: str = ""

    @abstractmethod
    def interval(self) -> Tuple[float, float]:
        pass

    @abstractmethod
    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        pass

    @abstractmethod
    def mean(self) -> float:
        pass

    @abstractmethod
    def _params(self) -> Dict[str, Any]:
        pass

    def to_record(self) -> Dict[str, Any]:
        return {"type": self.type_name, **self._params()}


@_register_factor("normal")
class Normal1D(Factor):
    def __init__(self, mu: float, sigma: float, truncation: float = DEFAULT_TRUNCATION):
        if not np.isfinite(mu) or not np.isfinite(sigma):
            raise ValueError("mu and sigma must be finite")
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        if truncation <= 0:
            raise ValueError("truncation must be positive")
        self.mu = float(mu)
        self.sigma = float(sigma)
        self.truncation = float(truncation)

    def interval(self) -> Tuple[float, float]:
        half = self.truncation * self.sigma
        return self.mu - half, self.mu + half

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return truncated_normal(rng, self.mu, self.sigma, self.truncation, size)[:, 0]

    def mean(self) -> float:
        return self.mu

    def _params(self) -> Dict[str, Any]:
        return {"mu": self.mu, "sigma": self.sigma, "truncation": self.truncation}


@_register_factor("uniform")
class Uniform1D(Factor):
    def __init__(self, a: float, b: float):
        if not np.isfinite(a) or not np.isfinite(b):
            raise ValueError("a and b must be finite")
        if a >= b:
            raise ValueError(f"Uniform1D requires a < b, got [{a}, {b}]")
        self.a = float(a)
        self.b = float(b)

    def interval(self) -> Tuple[float, float]:
        return self.a, self.b

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.a, self.b, size=size)

    def mean(self) -> float:
        return (self.a + self.b) / 2

    def _params(self) -> Dict[str, Any]:
        return {"a": self.a, "b": self.b}


@_register_factor("point")
class Point1D(Factor):
    """
    Zero-width dimension (a column without spread).
    """

    def __init__(self, at: float):
        if not np.isfinite(at):
            raise ValueError("at must be finite")
        self.at = float(at)

    def interval(self) -> Tuple[float, float]:
        return self.at, self.at

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.at)

    def mean(self) -> float:
        return self.at

    def _params(self) -> Dict[str, Any]:
        return {"at": self.at}


@register_pdf("product")
class DimProduct(Pdf):
    """
    Independent one-dimensional factors, one per dimension.
    """

    def __init__(self, factors: Sequence[Factor]):
        if len(factors) == 0:
            raise ValueError("DimProduct needs at least one factor")
        self.factors: Tuple[Factor, ...] = tuple(factors)

    @property
    def dim(self) -> int:
        return len(self.factors)

    def support_box(self) -> Tuple[np.ndarray, np.ndarray]:
        bounds = np.array([factor.interval() for factor in self.factors])
        return bounds[:, 0], bounds[:, 1]

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.column_stack([factor.draw(rng, size) for factor in self.factors])

    def mean(self) -> np.ndarray:
        return np.array([factor.mean() for factor in self.factors])

    def _params(self) -> Dict[str, Any]:
        return {"factors": [factor.to_record() for factor in self.factors]}


def _factor_from_record(record: Dict[str, Any]) -> Factor:
    params = dict(record)
    type_name = params.pop("type", None)
    if type_name not in _FACTOR_TYPES:
        raise ValueError(
            f"Unknown factor type '{type_name}'. Available: {sorted(_FACTOR_TYPES)}"
        )
    return _FACTOR_TYPES[type_name](**params)


def pdf_from_record(record: Dict[str, Any]) -> Pdf:
    """
    Build a pdf from its JSON record, e.g. {"type": "box", "low": [...], "high": [...]}.
    """
    params = dict(record)
    type_name = params.pop("type", None)
    if type_name not in _PDF_TYPES:
        raise ValueError(
            f"Unknown pdf type '{type_name}'. Available: {sorted(_PDF_TYPES)}"
        )
    try:
        if type_name == "product":
            factors: List[Factor] = [
                _factor_from_record(factor) for factor in params.pop("factors", [])
            ]
            return DimProduct(factors, **params)
        return _PDF_TYPES[type_name](**params)
    except TypeError as exc:
        raise ValueError(f"Bad parameters for pdf type '{type_name}': {exc}") from exc
