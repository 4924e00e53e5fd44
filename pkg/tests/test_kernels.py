"""
Unit tests for the closed-form kernels and gram assembly.
"""

import math

import numpy as np
import pytest

from src.analysis.kernels import (
    assemble_gram,
    clamp_unit,
    derivative_kernel,
    eval_kernel,
    kernel_matrix,
    pre_kernel,
)
from src.data_collection.mixture_generator import make_d1
from src.models.dataset import Dataset
from src.models.kernel import Activation, HyperParams, KernelKind
from src.utils.exceptions import CalculationError, DegenerateInputError, ValidationError


@pytest.fixture
def hyper1():
    return HyperParams(sigma_w2=1.0, sigma_b2=0.0, d0=1)


class TestPreKernel:
    """Tests for the pre-activation kernel."""

    def test_inner_product(self, hyper1):
        assert pre_kernel(2.0, 3.0, hyper1) == pytest.approx(6.0)

    def test_orthogonal_inputs(self):
        assert pre_kernel([1.0, 1.0], [1.0, -1.0], HyperParams(d0=2)) == 0.0

    def test_bias_term(self):
        assert pre_kernel(2.0, 3.0, HyperParams(sigma_b2=0.25)) == pytest.approx(6.25)

    def test_dimension_mismatch(self, hyper1):
        with pytest.raises(ValidationError):
            pre_kernel([1.0, 2.0], [1.0, 2.0], hyper1)


class TestEvalKernel:
    """Tests for pointwise kernel evaluation."""

    def test_nngp_erf(self, hyper1):
        expected = (2.0 / math.pi) * math.asin(2.0 / 3.0)
        assert eval_kernel(KernelKind.NNGP_ERF, 1.0, 1.0, hyper1) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.46454, abs=1e-4)

    def test_nngp_relu_same_point(self, hyper1):
        assert eval_kernel(KernelKind.NNGP_RELU, 2.0, 2.0, hyper1) == pytest.approx(2.0, rel=1e-14)

    def test_ntk_relu_opposite_points(self, hyper1):
        assert eval_kernel(KernelKind.NTK_RELU, 2.0, -2.0, hyper1) == pytest.approx(0.0, abs=1e-12)

    def test_ntk_relu_same_point(self, hyper1):
        assert eval_kernel(KernelKind.NTK_RELU, 2.0, 2.0, hyper1) == pytest.approx(4.0, rel=1e-14)

    def test_ntk_relu_with_bias(self):
        hyper = HyperParams(sigma_b2=0.25)
        # K = 4.25, Q = K / 2, Q_dot = 1 / 2
        assert eval_kernel(KernelKind.NTK_RELU, 2.0, 2.0, hyper) == pytest.approx(0.25 + 2.125 + 2.125)

    def test_linear(self):
        assert eval_kernel(KernelKind.LINEAR, [1.0, 2.0], [3.0, 4.0], HyperParams(d0=2)) == 11.0

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_symmetry_is_exact(self, kind):
        hyper = HyperParams(sigma_w2=1.3, sigma_b2=0.1, d0=3)
        x = np.array([0.3, -1.2, 2.5])
        y = np.array([-0.7, 0.4, 1.1])
        assert eval_kernel(kind, x, y, hyper) == eval_kernel(kind, y, x, hyper)

    def test_relu_zero_input(self, hyper1):
        with pytest.raises(DegenerateInputError):
            eval_kernel(KernelKind.NNGP_RELU, 0.0, 1.0, hyper1)

    def test_relu_zero_input_with_bias_is_fine(self):
        value = eval_kernel(KernelKind.NNGP_RELU, 0.0, 1.0, HyperParams(sigma_b2=0.5))
        assert np.isfinite(value)


class TestDerivativeKernel:
    """Tests for the derivative kernel."""

    def test_erf_at_origin(self, hyper1):
        assert derivative_kernel(Activation.ERF, 0.0, 0.0, hyper1) == pytest.approx(4.0 / math.pi)

    def test_erf_unit_inputs(self, hyper1):
        expected = (4.0 / math.pi) / math.sqrt(5.0)
        assert derivative_kernel(Activation.ERF, 1.0, 1.0, hyper1) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.56942, abs=1e-5)

    def test_relu_endpoints(self, hyper1):
        assert derivative_kernel(Activation.RELU, 1.5, 1.5, hyper1) == pytest.approx(0.5)
        assert derivative_kernel("relu", 1.5, -1.5, hyper1) == pytest.approx(0.0, abs=1e-15)


class TestClamp:
    """Tests for correlation clamping."""

    def test_rounding_noise_is_clipped(self):
        assert clamp_unit(1.0 + 1e-14) == 1.0

    def test_large_excess_raises(self):
        with pytest.raises(CalculationError):
            clamp_unit(1.001)


class TestGramAssembly:
    """Tests for gram matrices."""

    def test_erf_block_signs(self):
        dataset = make_d1(128, 2, seed=0)
        gram = assemble_gram(KernelKind.NNGP_ERF, dataset, HyperParams(d0=2))
        assert gram.values.shape == (128, 128)
        assert np.all(gram.block(0, 0) > 0)
        assert np.all(gram.block(1, 1) > 0)
        assert np.all(gram.block(0, 1) < 0)
        assert gram.partition == [64, 64]

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_exactly_symmetric(self, kind):
        dataset = make_d1(32, 3, seed=4)
        gram = assemble_gram(kind, dataset, HyperParams(d0=3, sigma_b2=0.1))
        assert np.array_equal(gram.values, gram.values.T)

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_one_sample_per_class(self, kind):
        dataset = Dataset(X=np.array([[-1.0, 2.0]]), labels=np.array([-1.0, 1.0]), partition=[1, 1])
        gram = assemble_gram(kind, dataset, HyperParams())
        assert gram.values.shape == (2, 2)
        assert gram.values[0, 1] == gram.values[1, 0]

    def test_linear_is_xtx(self):
        dataset = make_d1(16, 4, seed=1)
        gram = assemble_gram(KernelKind.LINEAR, dataset, HyperParams(d0=4))
        np.testing.assert_allclose(gram.values, dataset.X.T @ dataset.X, rtol=1e-14, atol=1e-14)

    @pytest.mark.parametrize("kind", [KernelKind.NNGP_ERF, KernelKind.NTK_RELU, KernelKind.NTK_ERF])
    def test_matches_pointwise(self, kind):
        dataset = make_d1(8, 2, seed=3)
        hyper = HyperParams(d0=2, sigma_b2=0.2)
        gram = assemble_gram(kind, dataset, hyper)
        for a in range(8):
            for b in range(8):
                expected = eval_kernel(kind, dataset.X[:, a], dataset.X[:, b], hyper)
                assert gram.values[a, b] == pytest.approx(expected, rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize("kind", [KernelKind.NNGP_ERF, KernelKind.NNGP_RELU])
    @pytest.mark.parametrize("n", [64, 512])
    def test_nngp_grams_are_psd(self, kind, n):
        dataset = make_d1(n, 2, seed=n)
        values = assemble_gram(kind, dataset, HyperParams(d0=2)).values
        norm = np.max(np.sum(np.abs(values), axis=1))
        assert np.linalg.eigvalsh(values).min() >= -1e-8 * norm

    def test_relu_zero_column(self):
        X = np.array([[1.0, 0.0, -1.0]])
        with pytest.raises(DegenerateInputError) as info:
            kernel_matrix(KernelKind.NNGP_RELU, X, HyperParams())
        assert info.value.column == 1

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            kernel_matrix(KernelKind.NNGP_ERF, np.ones((2, 4)), HyperParams(d0=3))
