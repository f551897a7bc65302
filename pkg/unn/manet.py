"""
Mobile ad hoc network demo: nodes moving under the random waypoint model are
uncertain objects, and a position belongs to the network that needs the
smaller transmission power to reach it.
"""

import logging
import os
import time
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .baselines import EknnParams, EKNNClassifier
from .io_utils import save_dataset, write_csv_rows
from .model import UNNClassifier, UnnParams, classify_all
from .objects import Dataset, UncertainObject, as_point, norms
from .pdf import Pdf, _as_vector, register_pdf
from .utils import derive_rng, format_time, parallel_map

AREA_LOW = np.array([-0.5, -0.5])
AREA_HIGH = np.array([0.5, 0.5])
# lower-right quadrant of the area
CORNER_LOW = np.array([0.0, -0.5])
CORNER_HIGH = np.array([0.5, 0.0])

RED, BLUE = "red", "blue"


@register_pdf("waypoint")
class WaypointPdf(Pdf):
    """
    Stationary node density of the random waypoint model on a square of side a:
    36 / a^6 * ((x - x0)^2 - a^2 / 4) * ((y - y0)^2 - a^2 / 4) inside, 0 outside.
    """

    def __init__(self, center: Sequence[float], side: float):
        self.center = _as_vector(center, "center")
        if self.center.size != 2:
            raise ValueError(f"center must be 2-dimensional, got {self.center.size}")
        if not np.isfinite(side) or side <= 0:
            raise ValueError(f"side must be positive, got {side}")
        self.side = float(side)

    @property
    def dim(self) -> int:
        return 2

    @property
    def peak(self) -> float:
        return 9.0 / (4.0 * self.side**2)

    def support_box(self):
        half = self.side / 2
        return self.center - half, self.center + half

    def density(self, points: np.ndarray) -> np.ndarray:
        offsets = np.atleast_2d(points) - self.center
        quarter = self.side**2 / 4
        inside = np.all(np.abs(offsets) <= self.side / 2, axis=-1)
        values = 36.0 / self.side**6 * np.prod(offsets**2 - quarter, axis=-1)
        return np.where(inside, np.maximum(values, 0.0), 0.0)

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        low, high = self.support_box()
        samples = np.empty((size, 2))
        filled = 0
        while filled < size:
            # acceptance rate is 4/9
            batch = 2 * (size - filled) + 8
            proposals = rng.uniform(low, high, size=(batch, 2))
            heights = rng.uniform(0.0, self.peak, size=batch)
            accepted = proposals[heights < self.density(proposals)][: size - filled]
            samples[filled : filled + len(accepted)] = accepted
            filled += len(accepted)
        return samples

    def mean(self) -> np.ndarray:
        return self.center

    def _params(self) -> Dict[str, Any]:
        return {"center": self.center.tolist(), "side": self.side}


def waypoint_density(p: Sequence[float], w: WaypointPdf) -> float:
    return float(w.density(as_point(p))[0])


def waypoint_sample(w: WaypointPdf, rng: np.random.Generator) -> np.ndarray:
    return w.sample(rng)


def network_power(
    v: Sequence[float],
    network: Sequence[Pdf],
    alpha_loss: float = 2.0,
    n_samples: int = 10**4,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    Expected d(v, nearest node)^alpha over n_samples joint outcomes of the network.
    """
    if len(network) == 0:
        raise ValueError("network needs at least one node")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    rng = rng if rng is not None else np.random.default_rng()
    v = as_point(v)
    positions = np.stack([node.sample(rng, n_samples) for node in network], axis=1)
    nearest = norms(positions - v).min(axis=1)
    return float(np.mean(nearest**alpha_loss))


def _place(
    rng: np.random.Generator, count: int, side: float, low: np.ndarray, high: np.ndarray
) -> List[WaypointPdf]:
    # centers keep the whole mobility square inside [low, high]
    half = side / 2
    centers = rng.uniform(low + half, high - half, size=(count, 2))
    return [WaypointPdf(center, side) for center in centers]


@dataclass
class ManetScenario:
    red: List[WaypointPdf]
    blue: List[WaypointPdf]
    test_points: np.ndarray
    alpha_loss: float = 2.0

    @classmethod
    def generate(
        cls,
        rng: np.random.Generator,
        n_red: int = 10,
        n_blue: int = 5,
        red_side: float = 0.2,
        blue_side: float = 0.05,
        n_test: int = 2500,
        alpha_loss: float = 2.0,
    ) -> "ManetScenario":
        red = _place(rng, n_red, red_side, AREA_LOW, AREA_HIGH)
        blue = _place(rng, n_blue, blue_side, CORNER_LOW, CORNER_HIGH)
        test_points = rng.uniform(AREA_LOW, AREA_HIGH, size=(n_test, 2))
        return cls(red, blue, test_points, alpha_loss)

    @property
    def dataset(self) -> Dataset:
        return Dataset(
            [UncertainObject(node, label=RED) for node in self.red]
            + [UncertainObject(node, label=BLUE) for node in self.blue]
        )

    def label(
        self, v: Sequence[float], power_samples: int, rng: np.random.Generator
    ) -> str:
        """
        Network requiring the least power to reach v.
        """
        red = network_power(v, self.red, self.alpha_loss, power_samples, rng)
        blue = network_power(v, self.blue, self.alpha_loss, power_samples, rng)
        return RED if red < blue else BLUE


def _label_point(
    scenario: ManetScenario, power_samples: int, seed: int, item
) -> str:
    index, v = item
    return scenario.label(v, power_samples, derive_rng(seed, index))


def boundary_grid(size: int = 50) -> np.ndarray:
    """
    Cell centers of a size x size raster over the simulation area.
    """
    ticks = AREA_LOW[0] + (np.arange(size) + 0.5) * (AREA_HIGH[0] - AREA_LOW[0]) / size
    xs, ys = np.meshgrid(ticks, ticks, indexing="xy")
    return np.column_stack([xs.ravel(), ys.ravel()])


@dataclass
class ManetReport:
    unn_accuracy: float
    eknn_accuracy: float
    truth: List[str] = field(default_factory=list)
    grid: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    grid_red: np.ndarray = field(default_factory=lambda: np.empty(0))


def run_manet_experiment(
    scenario: ManetScenario,
    k: int = 1,
    h: int = 100,
    n_samples: Optional[int] = None,
    m_outcomes: int = 100,
    power_samples: int = 10**4,
    grid_size: int = 50,
    seed: int = 0,
    jobs: int = 1,
    progress: bool = False,
) -> ManetReport:
    """
    Label the test points by network power, then score UNN and eKNN on them and
    rasterize the UNN probability of the red class.
    """
    start = time.perf_counter()
    points = list(scenario.test_points)
    truth = parallel_map(
        partial(_label_point, scenario, power_samples, seed),
        list(enumerate(points)),
        jobs=jobs,
        progress=progress,
        desc="power labels",
    )
    dataset = scenario.dataset
    unn = UNNClassifier(UnnParams(k=k, h=h, n_samples=n_samples, seed=seed), dataset)
    eknn = EKNNClassifier(EknnParams(k=k, m_outcomes=m_outcomes, seed=seed), dataset)

    accuracies = []
    for classifier in (unn, eknn):
        results = classify_all(classifier, points, jobs=jobs, progress=progress)
        scores = [classifier.score(result, label) for result, label in zip(results, truth)]
        accuracies.append(float(np.mean(scores)))

    grid = boundary_grid(grid_size)
    grid_results = classify_all(
        unn, list(grid), jobs=jobs, progress=progress, first_index=len(points)
    )
    grid_red = np.array([result.class_probs[RED] for result in grid_results])
    logging.info(
        f"UNN accuracy {accuracies[0]:.3f}, eKNN accuracy {accuracies[1]:.3f} "
        f"on {len(points)} points in {format_time(time.perf_counter() - start)}"
    )
    return ManetReport(accuracies[0], accuracies[1], truth, grid, grid_red)


def write_manet_outputs(
    scenario: ManetScenario, report: ManetReport, out_dir: str
) -> None:
    """
    boundary_grid.csv, manet_results.csv and the node pdfs as scenario.jsonl.
    """
    os.makedirs(out_dir, exist_ok=True)
    write_csv_rows(
        os.path.join(out_dir, "boundary_grid.csv"),
        ["x", "y", "prob_red"],
        [(x, y, p) for (x, y), p in zip(report.grid, report.grid_red)],
    )
    write_csv_rows(
        os.path.join(out_dir, "manet_results.csv"),
        ["method", "accuracy"],
        [("unn", report.unn_accuracy), ("eknn", report.eknn_accuracy)],
    )
    save_dataset(scenario.dataset, os.path.join(out_dir, "scenario.jsonl"))
