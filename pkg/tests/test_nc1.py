"""
Unit tests for the NC1 metric: kernel-trace path, feature path and relative NC1.
"""

import numpy as np
import pytest

from src.analysis.kernels import assemble_gram
from src.analysis.nc1 import (
    aggregate_log10,
    class_block_sums,
    covariance_matrices,
    data_nc1,
    nc1_of_features,
    nc1_of_gram,
    nc1_relative_report,
    relative_nc1,
    trace_between,
    trace_within,
)
from src.data_collection.mixture_generator import make_d1, sample_gaussian_mixture
from src.models.dataset import MixtureSpec
from src.models.kernel import Gram, HyperParams, KernelKind
from src.models.report import Nc1Report
from src.utils.exceptions import CalculationError, DegenerateBetweenVariance, ValidationError
from src.utils.rng import standard_normal, stream


def linear_gram(H: np.ndarray, partition) -> Gram:
    return Gram(H @ H.T, list(partition), KernelKind.LINEAR, HyperParams(d0=H.shape[1]))


def brute_force_traces(H: np.ndarray, partition):
    """Within and between traces from explicit loops over samples and class means."""
    bounds = np.concatenate([[0], np.cumsum(partition)])
    n_total, n_classes = H.shape[0], len(partition)
    means = [H[a:b].mean(axis=0) for a, b in zip(bounds[:-1], bounds[1:])]
    global_mean = H.mean(axis=0)
    within = 0.0
    for (a, b), mean in zip(zip(bounds[:-1], bounds[1:]), means):
        for h in H[a:b]:
            within += float((h - mean) @ (h - mean))
    between = sum(float((m - global_mean) @ (m - global_mean)) for m in means)
    return within / n_total, between / n_classes


@pytest.fixture
def random_features():
    g = stream(42)
    partition = [3, 2, 5]
    H = standard_normal(g, (10, 4)) + np.repeat(3.0 * standard_normal(g, (3, 4)), partition, axis=0)
    return H, partition


@pytest.fixture
def imbalanced_features():
    g = stream(43)
    partition = [3, 20]
    H = standard_normal(g, (23, 5)) + np.repeat(np.array([[2.0] * 5, [-1.0] * 5]), partition, axis=0)
    return H, partition


class TestBlockSums:
    """Tests for class block sums."""

    def test_block_sums(self):
        values = np.arange(16, dtype=float).reshape(4, 4)
        sums = class_block_sums(values, [1, 3])
        assert sums[0, 0] == values[0, 0]
        assert sums[1, 1] == values[1:, 1:].sum()
        assert sums.sum() == values.sum()


class TestTraces:
    """Tests for the within- and between-class traces of a gram."""

    def test_identical_within_class(self):
        H = np.repeat(np.array([[1.0, 2.0], [-3.0, 0.5], [0.0, 4.0]]), [4, 4, 4], axis=0)
        assert trace_within(linear_gram(H, [4, 4, 4])) == pytest.approx(0.0, abs=1e-12)

    def test_singleton_classes(self):
        H = standard_normal(stream(1), (3, 5))
        assert trace_within(linear_gram(H, [1, 1, 1])) == pytest.approx(0.0, abs=1e-12)

    def test_within_matches_brute_force(self, random_features):
        H, partition = random_features
        expected, _ = brute_force_traces(H, partition)
        assert trace_within(linear_gram(H, partition)) == pytest.approx(expected, rel=1e-10)

    def test_between_matches_brute_force(self, random_features):
        H, partition = random_features
        _, expected = brute_force_traces(H, partition)
        assert trace_between(linear_gram(H, partition)) == pytest.approx(expected, rel=1e-10)

    def test_globally_identical_features(self):
        H = np.tile([1.0, -2.0, 0.5], (6, 1))
        assert trace_between(linear_gram(H, [3, 3])) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric_balanced_classes(self):
        v = np.array([1.0, 2.0, -2.0])
        H = np.vstack([np.tile(-v, (5, 1)), np.tile(v, (5, 1))])
        assert trace_between(linear_gram(H, [5, 5])) == pytest.approx(float(v @ v))

    def test_imbalanced_matches_brute_force(self, imbalanced_features):
        H, partition = imbalanced_features
        within, between = brute_force_traces(H, partition)
        gram = linear_gram(H, partition)
        assert trace_within(gram) == pytest.approx(within, rel=1e-10)
        assert trace_between(gram) == pytest.approx(between, rel=1e-10)

    def test_imbalanced_collapsed_classes(self):
        """Identical rows per class: between is the class-averaged spread of the means around the global mean."""
        H = np.repeat(np.array([[4.0], [-1.0]]), [1, 4], axis=0)
        gram = linear_gram(H, [1, 4])
        assert trace_within(gram) == pytest.approx(0.0, abs=1e-12)
        assert trace_between(gram) == pytest.approx(0.5 * (4.0 ** 2 + 1.0 ** 2))

    def test_balanced_reduces_to_block_averages(self, random_features):
        H, _ = random_features
        partition = [5, 5]
        values = H @ H.T
        blocks = class_block_sums(values, partition)
        class_average = float(np.sum(np.diag(blocks)) / 25 / 2)
        gram = linear_gram(H, partition)
        assert trace_within(gram) == pytest.approx(np.trace(values) / 10 - class_average, rel=1e-12)
        assert trace_between(gram) == pytest.approx(class_average - blocks.sum() / 100, rel=1e-12)


class TestNc1OfGram:
    """Tests for nc1_of_gram."""

    def test_scale_invariance(self, random_features):
        H, partition = random_features
        gram = linear_gram(H, partition)
        base = nc1_of_gram(gram).nc1
        for factor in (1e-6, 3.0, 1e8):
            assert nc1_of_gram(gram.scaled(factor)).nc1 == pytest.approx(base, rel=1e-12)

    def test_collapsed_within(self):
        H = np.repeat(np.array([[1.0], [-1.0]]), [3, 3], axis=0)
        report = nc1_of_gram(linear_gram(H, [3, 3]))
        assert report.nc1 == 0.0
        assert report.log10_nc1 == float("-inf")

    def test_records_traces(self, random_features):
        H, partition = random_features
        report = nc1_of_gram(linear_gram(H, partition))
        assert report.nc1 == pytest.approx(report.tr_within / report.tr_between)
        assert report.tr_total is not None
        assert report.tr_between_noncentred is not None

    def test_degenerate_between(self):
        H = np.tile([1.0, 2.0], (4, 1)) + np.array([[0.1, 0.0], [-0.1, 0.0], [0.1, 0.0], [-0.1, 0.0]])
        with pytest.raises(DegenerateBetweenVariance):
            nc1_of_gram(linear_gram(H, [2, 2]))

    def test_not_psd(self):
        values = np.array(
            [[0.0, 5.0, 1.0, 1.0], [5.0, 0.0, 1.0, 1.0], [1.0, 1.0, 0.0, 5.0], [1.0, 1.0, 5.0, 0.0]]
        )
        with pytest.raises(CalculationError):
            nc1_of_gram(Gram(values, [2, 2], KernelKind.LINEAR, HyperParams()))


class TestNc1OfFeatures:
    """Tests for the explicit covariance path."""

    def test_identical_rows_per_class(self):
        H = np.repeat(np.array([[0.0, 1.0], [2.0, -1.0]]), [4, 4], axis=0)
        assert nc1_of_features(H, [4, 4]).nc1 == 0.0

    def test_imbalanced_matches_brute_force(self, imbalanced_features):
        H, partition = imbalanced_features
        within, between = brute_force_traces(H, partition)
        report = nc1_of_features(H, partition)
        assert report.tr_within == pytest.approx(within, rel=1e-10)
        assert report.tr_between == pytest.approx(between, rel=1e-10)
        assert report.nc1 == pytest.approx(within / between, rel=1e-10)

    def test_imbalanced_gram_path_agrees(self, imbalanced_features):
        H, partition = imbalanced_features
        via_gram = nc1_of_gram(linear_gram(H, partition))
        assert via_gram.nc1 == pytest.approx(nc1_of_features(H, partition).nc1, rel=1e-10)

    def test_decomposition(self, imbalanced_features):
        H, partition = imbalanced_features
        report = nc1_of_features(H, partition)
        assert report.tr_total == pytest.approx(report.tr_within + report.tr_between_noncentred, rel=1e-10)

    def test_covariances_are_symmetric(self, random_features):
        H, partition = random_features
        for matrix in covariance_matrices(H, partition):
            assert matrix.shape == (4, 4)
            np.testing.assert_allclose(matrix, matrix.T)

    def test_partition_mismatch(self, random_features):
        H, _ = random_features
        with pytest.raises(ValidationError):
            nc1_of_features(H, [5, 4])

    def test_matches_gram_path(self):
        """Both paths agree on random features with 2 to 4 classes."""
        for k in range(25):
            g = stream(7, k)
            n_classes = int(g.integers(2, 5))
            d = int(g.integers(1, 9))
            partition = [int(n) for n in g.integers(1, 64 // n_classes + 1, size=n_classes)]
            H = standard_normal(g, (sum(partition), d)) + np.repeat(
                2.0 * standard_normal(g, (n_classes, d)), partition, axis=0
            )
            via_features = nc1_of_features(H, partition)
            via_gram = nc1_of_gram(linear_gram(H, partition))
            assert via_gram.nc1 == pytest.approx(via_features.nc1, rel=1e-10, abs=1e-12)

    def test_data_nc1_is_identity_feature_map(self):
        dataset = make_d1(64, 3, seed=0)
        assert data_nc1(dataset).nc1 == pytest.approx(nc1_of_features(dataset.X.T, dataset.partition).nc1)


class TestRelativeNc1:
    """Tests for NC1 relative to the data."""

    def test_self_relative(self):
        dataset = make_d1(128, 2, seed=5)
        gram = assemble_gram(KernelKind.LINEAR, dataset, HyperParams(d0=2))
        assert relative_nc1(gram, dataset) == pytest.approx(1.0, rel=1e-5)

    def test_report_fields(self):
        dataset = make_d1(128, 1, seed=5)
        report = nc1_relative_report(assemble_gram(KernelKind.NNGP_ERF, dataset, HyperParams()), dataset)
        assert report.nc1_data == pytest.approx(data_nc1(dataset).nc1)
        assert report.relative_nc1 == pytest.approx(report.nc1 / (report.nc1_data + 1e-8))

    def test_tau_must_be_positive(self):
        dataset = make_d1(16, 1, seed=0)
        gram = assemble_gram(KernelKind.LINEAR, dataset, HyperParams())
        with pytest.raises(ValidationError):
            relative_nc1(gram, dataset, tau=0.0)

    def test_partition_mismatch(self):
        dataset = make_d1(16, 1, seed=0)
        gram = Gram(np.eye(16), [4, 12], KernelKind.LINEAR, HyperParams())
        with pytest.raises(ValidationError):
            nc1_relative_report(gram, dataset)

    def test_erf_on_collapsed_data(self):
        spec = MixtureSpec.from_lists([-10.0, 10.0], [1.0, 1.0], [512, 512], [-1.0, 1.0], d0=128)
        dataset = sample_gaussian_mixture(spec, seed=0)
        gram = assemble_gram(KernelKind.NNGP_ERF, dataset, HyperParams(d0=128))
        assert relative_nc1(gram, dataset) > 1.0


class TestAggregate:
    """Tests for seed aggregation."""

    def test_mean_and_sample_std(self):
        reports = [Nc1Report.from_traces(1.0, b) for b in (10.0, 100.0, 1000.0)]
        mean, std = aggregate_log10(reports)
        assert mean == pytest.approx(-2.0)
        assert std == pytest.approx(1.0)

    def test_ignores_infinite(self):
        reports = [Nc1Report.from_traces(0.0, 1.0), Nc1Report.from_traces(1.0, 10.0)]
        assert aggregate_log10(reports) == (pytest.approx(-1.0), 0.0)

    def test_empty(self):
        mean, std = aggregate_log10([])
        assert np.isnan(mean) and np.isnan(std)


@pytest.mark.slow
class TestLowDimensionalCollapse:
    """Seed-averaged gram NC1 on D1(1024, 1)."""

    @pytest.mark.parametrize("kind, expected", [(KernelKind.NNGP_ERF, -2.1), (KernelKind.NNGP_RELU, -0.95)])
    def test_mean_log10_nc1(self, kind, expected):
        reports = [
            nc1_of_gram(assemble_gram(kind, make_d1(1024, 1, seed), HyperParams()))
            for seed in range(10)
        ]
        mean, _ = aggregate_log10(reports)
        assert abs(mean - expected) <= 0.15
