import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unn.objects import (
    Dataset,
    SupportBall,
    UncertainObject,
    as_ball,
    certain_dataset,
    distance,
    maxdist,
    mindist,
    support_ball,
)
from unn.pdf import (
    DimProduct,
    DiscreteMixture,
    GaussianProduct,
    Normal1D,
    Point1D,
    PointMass,
    Uniform1D,
    UniformBox,
    pdf_from_record,
)

coords = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
radii = st.floats(min_value=0.0, max_value=1e2, allow_nan=False)


def all_pdfs():
    return [
        PointMass([1.0, 2.0]),
        DiscreteMixture([[0.0, 0.0], [1.0, 3.0], [-2.0, 1.0]], [0.2, 0.3, 0.5]),
        GaussianProduct([0.5, -1.0], [0.3, 2.0]),
        UniformBox([0.0, 0.0], [2.0, 1.0]),
        DimProduct([Normal1D(0.0, 1.0), Uniform1D(-1.0, 2.0)]),
        DimProduct([Point1D(3.0), Normal1D(1.0, 0.1)]),
    ]


class TestDistance:
    def test_pythagorean(self):
        assert distance([0, 0], [3, 4]) == 5.0

    def test_identity(self):
        assert distance([1.5, -2.0], [1.5, -2.0]) == 0.0

    @given(st.lists(coords, min_size=3, max_size=3), st.lists(coords, min_size=3, max_size=3))
    def test_symmetric(self, a, b):
        assert distance(a, b) == distance(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            distance([0, 0], [0, 0, 0])


class TestSupportBall:
    def test_point_mass(self):
        ball = support_ball(PointMass([1, 2]))
        np.testing.assert_array_equal(ball.center, [1, 2])
        assert ball.radius == 0

    def test_uniform_box(self):
        ball = support_ball(UniformBox([0, 0], [2, 2]))
        np.testing.assert_allclose(ball.center, [1, 1])
        assert ball.radius == pytest.approx(math.sqrt(2))

    def test_truncated_gaussian(self):
        ball = support_ball(GaussianProduct([0, 0], [1, 1]))
        np.testing.assert_allclose(ball.center, [0, 0])
        assert ball.radius == pytest.approx(4 * math.sqrt(2))

    def test_mixture_centroid(self):
        ball = support_ball(DiscreteMixture([[0, 0], [4, 0]], [0.9, 0.1]))
        np.testing.assert_allclose(ball.center, [2, 0])
        assert ball.radius == pytest.approx(2)

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            SupportBall(np.zeros(2), -1.0)

    @pytest.mark.parametrize("pdf", all_pdfs(), ids=lambda pdf: type(pdf).__name__)
    def test_samples_inside(self, pdf):
        rng = np.random.default_rng(0)
        ball = support_ball(pdf)
        assert ball.contains(pdf.sample(rng, 5000))


class TestMinMaxDist:
    def test_points(self):
        a, b = SupportBall([0, 0]), SupportBall([3, 4])
        assert mindist(a, b) == maxdist(a, b) == 5

    def test_overlap(self):
        a, b = SupportBall([0.0], 2.0), SupportBall([3.0], 2.0)
        assert mindist(a, b) == 0

    def test_formulas(self):
        a, b = SupportBall([0.0], 1.0), SupportBall([10.0], 2.0)
        assert mindist(a, b) == 7
        assert maxdist(a, b) == 13

    @given(
        st.lists(coords, min_size=2, max_size=2),
        radii,
        st.lists(coords, min_size=2, max_size=2),
        radii,
    )
    @settings(max_examples=200)
    def test_order_and_symmetry(self, c1, r1, c2, r2):
        a, b = SupportBall(c1, r1), SupportBall(c2, r2)
        assert mindist(a, b) <= maxdist(a, b)
        assert mindist(a, b) == mindist(b, a)
        assert maxdist(a, b) == maxdist(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mindist(SupportBall([0.0]), SupportBall([0.0, 1.0]))


class TestSampling:
    def test_point_mass(self):
        rng = np.random.default_rng(1)
        np.testing.assert_array_equal(PointMass([1, 2]).sample(rng), [1, 2])

    def test_single_and_batch_shapes(self):
        rng = np.random.default_rng(1)
        pdf = UniformBox([0, 0, 0], [1, 1, 1])
        assert pdf.sample(rng).shape == (3,)
        assert pdf.sample(rng, 7).shape == (7, 3)

    def test_box_mean(self):
        rng = np.random.default_rng(2)
        samples = UniformBox([0.0, -2.0], [2.0, 2.0]).sample(rng, 10**5)
        stderr = np.array([2.0, 4.0]) / math.sqrt(12) / math.sqrt(10**5)
        assert np.all(np.abs(samples.mean(axis=0) - [1.0, 0.0]) < 3 * stderr)

    def test_mixture_frequency(self):
        rng = np.random.default_rng(3)
        samples = DiscreteMixture([[0.0], [1.0]], [0.25, 0.75]).sample(rng, 10**5)
        assert np.mean(samples[:, 0] == 1.0) == pytest.approx(0.75, abs=0.01)

    def test_truncation(self):
        rng = np.random.default_rng(4)
        samples = GaussianProduct([0.0], [1.0], truncation=1.0).sample(rng, 10**4)
        assert np.all(np.abs(samples) <= 1.0)

    def test_deterministic(self):
        pdf = GaussianProduct([0.0, 1.0], [1.0, 0.5])
        first = pdf.sample(np.random.default_rng(5), 10)
        second = pdf.sample(np.random.default_rng(5), 10)
        np.testing.assert_array_equal(first, second)


class TestPdfValidation:
    def test_mixture_weights_sum(self):
        with pytest.raises(ValueError):
            DiscreteMixture([[0.0], [1.0]], [0.5, 0.6])

    def test_mixture_weights_positive(self):
        with pytest.raises(ValueError):
            DiscreteMixture([[0.0], [1.0]], [1.5, -0.5])

    def test_box_order(self):
        with pytest.raises(ValueError):
            UniformBox([0.0, 1.0], [1.0, 1.0])

    def test_sigmas_positive(self):
        with pytest.raises(ValueError):
            GaussianProduct([0.0], [0.0])

    def test_non_finite_point(self):
        with pytest.raises(ValueError):
            PointMass([np.nan])


class TestRecords:
    @pytest.mark.parametrize("pdf", all_pdfs(), ids=lambda pdf: type(pdf).__name__)
    def test_round_trip(self, pdf):
        restored = pdf_from_record(pdf.to_record())
        assert type(restored) is type(pdf)
        assert restored.to_record() == pdf.to_record()

    def test_unknown_type(self):
        with pytest.raises(ValueError, match="Unknown pdf type"):
            pdf_from_record({"type": "cauchy"})

    def test_bad_parameters(self):
        with pytest.raises(ValueError, match="Bad parameters"):
            pdf_from_record({"type": "box", "low": [0.0]})

    def test_unknown_factor(self):
        with pytest.raises(ValueError, match="Unknown factor type"):
            pdf_from_record({"type": "product", "factors": [{"type": "laplace"}]})


class TestDataset:
    def test_labels_and_counts(self):
        dataset = certain_dataset([[0.0], [1.0], [2.0]], ["b", "a", "b"])
        assert dataset.labels == ["a", "b"]
        assert dataset.counts() == {"a": 1, "b": 2}
        assert dataset.dim == 1
        assert dataset.is_certain

    def test_needs_two_labels(self):
        with pytest.raises(ValueError):
            certain_dataset([[0.0], [1.0]], ["a", "a"])

    def test_needs_one_dimension(self):
        with pytest.raises(ValueError):
            Dataset(
                [
                    UncertainObject.certain([0.0], "a"),
                    UncertainObject.certain([0.0, 1.0], "b"),
                ]
            )

    def test_needs_labels(self):
        with pytest.raises(ValueError):
            Dataset([UncertainObject.certain([0.0], "a"), UncertainObject.certain([1.0])])

    def test_relabel(self):
        dataset = certain_dataset([[0.0], [1.0], [2.0]], ["a", "b", "c"])
        merged = dataset.relabel({"b": "rest", "c": "rest"})
        assert merged.labels == ["a", "rest"]

    def test_as_ball(self):
        obj = UncertainObject(UniformBox([0.0], [2.0]))
        assert as_ball(obj).radius == pytest.approx(1.0)
        assert as_ball([3.0]).radius == 0.0
