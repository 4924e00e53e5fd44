"""
Unit tests for the leading-order NC1 predictors.
"""

import logging

import pytest

from src.analysis.predictors import (
    balanced_params,
    check_assumptions,
    corollary1_ratio,
    data_case_values,
    erf_case_values,
    erf_truncation_bound,
    expected_nc1,
    predicted_pair,
    relu_case_values,
    relu_truncation_bound,
    sign_violation_probability,
    t_moment,
    theorem2_expected_nc1,
)
from src.models.kernel import KernelKind
from src.models.predictor import CaseValues, DenominatorVariant, GaussParams1D
from src.utils.exceptions import CalculationError, ValidationError


@pytest.fixture
def d1_params():
    return balanced_params(2.0, 0.5, 1024)


class TestTMoment:
    """Tests for the second-order E[1/x^2] approximation."""

    def test_reference_value(self):
        assert t_moment(2.0, 0.5) == pytest.approx(0.28903, abs=1e-5)

    def test_zero_spread(self):
        assert t_moment(1.0, 0.0) == pytest.approx(1.0)

    def test_even_in_mu(self):
        assert t_moment(-2.0, 0.5) == t_moment(2.0, 0.5)

    def test_undefined_at_origin(self):
        with pytest.raises(CalculationError):
            t_moment(0.0, 0.0)


class TestAssumptions:
    """Tests for the separation check."""

    def test_well_separated(self, d1_params):
        assert check_assumptions(d1_params) is True

    def test_warns_when_close_to_origin(self, caplog):
        p = balanced_params(1.0, 1.0, 8)
        with caplog.at_level(logging.WARNING):
            assert check_assumptions(p) is False
        assert "leading-order" in caplog.text

    def test_invalid_counts(self):
        with pytest.raises(ValidationError):
            check_assumptions(GaussParams1D(-2.0, 2.0, 0.5, 0.5, 0, 4))


class TestCaseValues:
    """Tests for the per-case expected kernel entries."""

    def test_relu_nngp(self, d1_params):
        cases = relu_case_values(d1_params, "nngp")
        assert cases.v1 == pytest.approx((2.125, 2.125))
        assert cases.v2 == pytest.approx((2.0, 2.0))
        assert cases.v3 == 0.0

    def test_relu_ntk_doubles_at_unit_weight_variance(self, d1_params):
        nngp = relu_case_values(d1_params, KernelKind.NNGP_RELU)
        ntk = relu_case_values(d1_params, KernelKind.NTK_RELU)
        assert ntk.v1 == pytest.approx(tuple(2 * v for v in nngp.v1))
        assert ntk.v2 == pytest.approx(tuple(2 * v for v in nngp.v2))

    def test_relu_zero_spread(self):
        cases = relu_case_values(balanced_params(2.0, 0.0, 8), "nngp")
        assert cases.v1 == cases.v2

    def test_relu_rejects_linear_kind(self, d1_params):
        with pytest.raises(ValidationError):
            relu_case_values(d1_params, KernelKind.LINEAR)

    def test_erf(self, d1_params):
        cases = erf_case_values(d1_params)
        assert cases.v1 == pytest.approx((0.85549, 0.85549), abs=1e-5)
        assert cases.v2 == pytest.approx((0.85026, 0.85026), abs=1e-5)
        # opposite-sign means give a negative cross entry
        assert cases.v3 < 0
        assert abs(cases.v3) == pytest.approx(1 - 0.28903 / 2 - 0.28903 ** 2 / 16, abs=1e-5)

    def test_erf_far_means(self):
        cases = erf_case_values(balanced_params(1000.0, 1e-3, 8))
        assert cases.v1[0] == pytest.approx(1.0, abs=1e-6)
        assert cases.v2[1] == pytest.approx(1.0, abs=1e-6)

    def test_data(self, d1_params):
        cases = data_case_values(d1_params)
        assert cases.v1 == pytest.approx((4.25, 4.25))
        assert cases.v2 == pytest.approx((4.0, 4.0))
        assert cases.v3 == pytest.approx(-4.0)

    def test_data_coinciding_classes(self):
        cases = data_case_values(GaussParams1D(2.0, 2.0, 0.5, 0.5, 4, 4))
        assert cases.v3 == cases.v2[0]


class TestExpectedNc1:
    """Tests for the two-class expected NC1."""

    def test_data_cases_large_n(self):
        n = 10 ** 7
        value = expected_nc1(data_case_values(balanced_params(2.0, 0.5, 2 * n)), n, n)
        # 2 (sigma1^2 + sigma2^2) / (mu1 - mu2)^2
        assert value == pytest.approx(0.0625, rel=1e-5)

    def test_relu_cases_balanced(self, d1_params):
        value = expected_nc1(relu_case_values(d1_params, "nngp"), 512, 512)
        # finite-n correction is O(1/n): about 2e-3 relative at n = 512
        assert value == pytest.approx(0.125, rel=5e-3)

    def test_relu_cases_balanced_large_n(self):
        n = 10 ** 6
        value = expected_nc1(relu_case_values(balanced_params(2.0, 0.5, 2 * n), "nngp"), n, n)
        assert value == pytest.approx(0.125, rel=1e-4)

    def test_collapsed_classes(self):
        cases = CaseValues(v1=(3.0, 3.0), v2=(3.0, 3.0), v3=-3.0)
        assert expected_nc1(cases, 100, 100) == pytest.approx(0.0, abs=1e-15)

    def test_invalid_counts(self):
        with pytest.raises(ValidationError):
            expected_nc1(CaseValues(v1=(1.0, 1.0), v2=(1.0, 1.0), v3=0.0), 0, 5)


class TestReluClosedForm:
    """Tests for the closed-form ReLU prediction."""

    def test_as_printed(self, d1_params):
        assert theorem2_expected_nc1(d1_params, DenominatorVariant.AS_PRINTED) == pytest.approx(0.0625)

    def test_appendix_d(self, d1_params):
        assert theorem2_expected_nc1(d1_params, "appendix-D") == pytest.approx(0.125)

    def test_default_variant(self, d1_params):
        assert theorem2_expected_nc1(d1_params) == pytest.approx(0.0625)

    def test_zero_spread(self):
        p = balanced_params(2.0, 0.0, 1024)
        assert predicted_pair(p) == (pytest.approx(0.0, abs=1e-15), pytest.approx(0.0, abs=1e-15))

    def test_appendix_d_matches_relu_cases(self):
        """Dropping the cross term agrees with the V3 = 0 case values at large N."""
        n = 10 ** 9
        p = balanced_params(2.0, 0.5, 2 * n)
        via_cases = expected_nc1(relu_case_values(p, "nngp"), n, n)
        assert theorem2_expected_nc1(p, "appendix-D") == pytest.approx(via_cases, rel=1e-8)


class TestRelativeRatio:
    """Tests for the relative NC1 prediction."""

    def test_balanced_symmetric(self, d1_params):
        assert corollary1_ratio(d1_params) == pytest.approx(2.0)

    def test_coinciding_means(self):
        p = GaussParams1D(2.0, 2.0, 0.5, 0.5, 512, 512)
        assert corollary1_ratio(p) == pytest.approx(0.0, abs=1e-12)

    def test_vanishing_minority(self):
        p = GaussParams1D(-2.0, 4.0, 0.5, 0.5, 1, 10 ** 9)
        assert corollary1_ratio(p) == pytest.approx(1.0, abs=1e-6)

    def test_symmetric_means_any_split(self):
        p = GaussParams1D(-2.0, 2.0, 0.5, 0.5, 256, 1792)
        assert corollary1_ratio(p) == pytest.approx(2.0)

    def test_composes_with_case_values(self):
        n = 10 ** 9
        p = balanced_params(2.0, 0.5, 2 * n)
        composed = expected_nc1(relu_case_values(p, "nngp"), n, n) / expected_nc1(data_case_values(p), n, n)
        assert composed == pytest.approx(corollary1_ratio(p), rel=1e-8)


class TestBounds:
    """Tests for the truncation bounds."""

    def test_sign_violation(self, d1_params):
        assert sign_violation_probability(d1_params) == pytest.approx(3.167e-5, rel=1e-3)
        assert sign_violation_probability(balanced_params(2.0, 0.0, 4)) == 0.0

    def test_erf_bound_is_small_for_far_means(self):
        assert erf_truncation_bound(balanced_params(4.0, 0.25, 2)) < 5e-3

    def test_relu_bound_scales_with_entries(self, d1_params):
        cases = relu_case_values(d1_params, "nngp")
        bound = relu_truncation_bound(d1_params, cases)
        assert bound == pytest.approx(2 * sign_violation_probability(d1_params) * 2.125)

    def test_balanced_params_needs_even_n(self):
        with pytest.raises(ValidationError):
            balanced_params(2.0, 0.5, 7)
