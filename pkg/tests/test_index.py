import numpy as np
import pytest

from unn.index import LinearScan, PivotTable, build_index
from unn.model import radius_for_class
from unn.objects import Dataset, SupportBall, UncertainObject, certain_dataset, norms
from unn.pdf import GaussianProduct, UniformBox


def random_dataset(rng: np.random.Generator, n: int = 40, dim: int = 2) -> Dataset:
    objects = []
    for i in range(n):
        center = rng.uniform(-5, 5, size=dim)
        if i % 3 == 0:
            pdf = GaussianProduct(center, rng.uniform(0.05, 0.5, size=dim))
        else:
            half = rng.uniform(0.0, 0.8, size=dim) + 1e-3
            pdf = UniformBox(center - half, center + half)
        objects.append(UncertainObject(pdf, label="a" if i % 2 else "b"))
    return Dataset(objects)


def random_ball(rng: np.random.Generator, dim: int = 2) -> SupportBall:
    return SupportBall(rng.uniform(-6, 6, size=dim), float(rng.uniform(0, 1)))


class TestPivotTable:
    def test_stored_distances(self):
        dataset = certain_dataset([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]], ["a", "b", "a"])
        table = PivotTable(dataset, num_pivots=1, seed=0)
        assert table.dists.shape == (3, 1)
        pivot = table.pivots[0]
        for i, center in enumerate(dataset.centers):
            assert table.dists[i, 0] == norms(center - pivot)

    def test_distinct_pivots(self):
        dataset = random_dataset(np.random.default_rng(0))
        table = PivotTable(dataset, num_pivots=16, seed=1)
        assert len(set(table.pivot_indices.tolist())) == 16

    def test_too_many_pivots(self):
        dataset = certain_dataset([[0.0], [1.0]], ["a", "b"])
        with pytest.raises(ValueError):
            PivotTable(dataset, num_pivots=3)

    def test_lower_bounds_valid(self):
        rng = np.random.default_rng(2)
        dataset = random_dataset(rng)
        table = PivotTable(dataset, num_pivots=8, seed=3)
        for _ in range(50):
            ball = random_ball(rng)
            exact = norms(dataset.centers - ball.center)
            assert np.all(table.center_lower_bounds(ball) <= exact + 1e-12)


class TestQueries:
    @pytest.mark.parametrize("num_pivots", [0, 1, 4, 16])
    def test_knn_maxdist_matches_linear_scan(self, num_pivots):
        rng = np.random.default_rng(num_pivots)
        for trial in range(100):
            dataset = random_dataset(rng)
            linear = LinearScan(dataset)
            pivoted = build_index(dataset, num_pivots=num_pivots, seed=trial)
            ball = random_ball(rng)
            for label in dataset.labels:
                members = dataset.mask(label)
                for k in (1, 2, 3):
                    expected = linear.knn_maxdist(ball, members, k)
                    found = pivoted.knn_maxdist(ball, members, k)
                    assert found[0] == expected[0]
                    np.testing.assert_array_equal(found[1], expected[1])
                    assert 0 <= found[2] <= members.sum()

    @pytest.mark.parametrize("num_pivots", [0, 1, 4, 16])
    def test_range_mindist_matches_linear_scan(self, num_pivots):
        rng = np.random.default_rng(100 + num_pivots)
        for trial in range(100):
            dataset = random_dataset(rng)
            linear = LinearScan(dataset)
            pivoted = build_index(dataset, num_pivots=num_pivots, seed=trial)
            ball = random_ball(rng)
            r_max = float(rng.uniform(0, 6))
            expected, _ = linear.range_mindist(ball, r_max)
            found, pruned = pivoted.range_mindist(ball, r_max)
            np.testing.assert_array_equal(found, expected)
            assert 0 <= pruned <= len(dataset)

    def test_knn_matches_radius_for_class(self):
        rng = np.random.default_rng(5)
        dataset = random_dataset(rng)
        table = PivotTable(dataset, num_pivots=6)
        ball = random_ball(rng)
        members = dataset.mask("a")
        objects = [obj for obj in dataset if obj.label == "a"]
        for k in (1, 2, 3):
            radius, _, _ = table.knn_maxdist(ball, members, k)
            assert radius == radius_for_class(ball, objects, k)

    def test_deficient_class(self):
        dataset = certain_dataset([[0.0], [1.0], [2.0]], ["a", "b", "b"])
        radius, witnesses, _ = LinearScan(dataset).knn_maxdist(
            SupportBall([0.0]), dataset.mask("a"), 2
        )
        assert radius == np.inf
        assert witnesses.size == 0

    def test_infinite_radius_returns_everything(self):
        dataset = random_dataset(np.random.default_rng(6))
        found, _ = PivotTable(dataset, 4).range_mindist(SupportBall([0.0, 0.0]), np.inf)
        np.testing.assert_array_equal(found, np.arange(len(dataset)))

    def test_zero_radius_keeps_overlapping_supports(self):
        dataset = Dataset(
            [
                UncertainObject(UniformBox([-1.0], [1.0]), label="a"),
                UncertainObject(UniformBox([2.0], [3.0]), label="b"),
            ]
        )
        found, _ = build_index(dataset, 1).range_mindist(SupportBall([0.5]), 0.0)
        np.testing.assert_array_equal(found, [0])

    def test_pivots_prune_far_objects(self):
        points = np.concatenate([np.zeros((1, 2)), np.full((50, 2), 100.0)])
        dataset = certain_dataset(points, ["a"] + ["b"] * 50)
        table = PivotTable(dataset, num_pivots=len(dataset), seed=0)
        found, pruned = table.range_mindist(SupportBall([0.0, 0.0]), 1.0)
        np.testing.assert_array_equal(found, [0])
        assert pruned == 50

    def test_dimension_mismatch(self):
        dataset = certain_dataset([[0.0], [1.0]], ["a", "b"])
        with pytest.raises(ValueError):
            LinearScan(dataset).min_mindist(SupportBall([0.0, 0.0]))


def test_build_index_kinds():
    dataset = certain_dataset([[0.0], [1.0]], ["a", "b"])
    assert type(build_index(dataset)) is LinearScan
    assert isinstance(build_index(dataset, num_pivots=1), PivotTable)
