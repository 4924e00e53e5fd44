"""
Unit tests for models.
"""

import numpy as np
import pytest

from src.models.config import Config, Profile
from src.models.dataset import Dataset, MixtureSpec
from src.models.eos import AnnealSchedule, SolverConfig
from src.models.fcn import FcnArchitecture, TrainConfig
from src.models.kernel import Activation, Gram, HyperParams, KernelKind
from src.models.predictor import CaseValues, DenominatorVariant, GaussParams1D
from src.models.report import Nc1Report
from src.models.sweep import MethodSpec, RecordStatus, SweepConfig, SweepRecord, SweepResult
from src.utils.exceptions import ValidationError


class TestKernelKind:
    """Tests for KernelKind and Activation."""

    def test_from_name_accepts_labels(self):
        assert KernelKind.from_name("NNGP-Erf") is KernelKind.NNGP_ERF
        assert KernelKind.from_name("ntk_relu") is KernelKind.NTK_RELU
        assert KernelKind.from_name("linear") is KernelKind.LINEAR

    def test_from_name_unknown(self):
        with pytest.raises(ValidationError):
            KernelKind.from_name("rbf")

    def test_properties(self):
        assert KernelKind.NTK_ERF.is_ntk
        assert not KernelKind.NNGP_RELU.is_ntk
        assert KernelKind.NTK_RELU.activation is Activation.RELU
        assert KernelKind.LINEAR.activation is None
        assert KernelKind.NTK_RELU.label == "NTK-ReLU"
        assert KernelKind.NNGP_ERF.label == "NNGP-Erf"

    def test_activation_from_name(self):
        assert Activation.from_name(" ERF ") is Activation.ERF
        with pytest.raises(ValidationError):
            Activation.from_name("tanh")


class TestHyperParams:
    """Tests for HyperParams."""

    def test_defaults_are_valid(self):
        hyper = HyperParams()
        hyper.validate()
        assert hyper.sigma_a2 == pytest.approx(1 / 128)

    @pytest.mark.parametrize(
        "fields",
        [{"sigma_w2": 0.0}, {"sigma_b2": -0.1}, {"d0": 0}, {"sigma_a2": 0.0}],
    )
    def test_invalid_values(self, fields):
        with pytest.raises(ValidationError):
            HyperParams(**fields).validate()

    def test_with_d0_copies(self):
        hyper = HyperParams(sigma_w2=2.0)
        other = hyper.with_d0(8)
        assert other.d0 == 8 and other.sigma_w2 == 2.0
        assert hyper.d0 == 1


class TestDataset:
    """Tests for Dataset and MixtureSpec."""

    def test_partition_must_sum_to_n(self):
        with pytest.raises(ValidationError):
            Dataset(X=np.zeros((1, 4)), labels=np.zeros(4), partition=[2, 1])

    def test_empty_class_rejected(self):
        with pytest.raises(ValidationError):
            Dataset(X=np.zeros((1, 4)), labels=np.zeros(4), partition=[4, 0])

    def test_class_layout(self):
        dataset = Dataset(
            X=np.arange(10, dtype=float).reshape(2, 5),
            labels=np.array([-1.0, -1.0, 1.0, 1.0, 1.0]),
            partition=[2, 3],
        )
        assert dataset.d0 == 2
        assert dataset.n_samples == 5
        assert dataset.class_slices() == [slice(0, 2), slice(2, 5)]
        assert list(dataset.class_ids()) == [0, 0, 1, 1, 1]
        assert dataset.class_labels() == [-1.0, 1.0]
        assert dataset.header()["partition"] == [2, 3]

    def test_mixture_spec_validation(self):
        spec = MixtureSpec.from_lists([-2, 2], [0.5, 0.5], [4, 4], [-1, 1], d0=3)
        spec.validate()
        assert spec.n_samples == 8

        with pytest.raises(ValidationError):
            MixtureSpec.from_lists([-2, 2], [0.5, 0.0], [4, 4], [-1, 1], d0=1).validate()
        with pytest.raises(ValidationError):
            MixtureSpec.from_lists([-2, 2], [0.5, 0.5], [4, 4], [1, 1], d0=1).validate()
        with pytest.raises(ValidationError):
            MixtureSpec.from_lists([-2, 2], [0.5, 0.5], [4, 0], [-1, 1], d0=1).validate()

    def test_with_counts(self):
        spec = MixtureSpec.from_lists([-2, 2], [0.5, 0.5], [4, 4], [-1, 1], d0=1)
        assert [c.count for c in spec.with_counts([1, 7]).classes] == [1, 7]
        with pytest.raises(ValidationError):
            spec.with_counts([1, 2, 3])


class TestGram:
    """Tests for Gram."""

    def test_blocks(self):
        values = np.arange(9, dtype=float).reshape(3, 3)
        gram = Gram(values, [1, 2], KernelKind.LINEAR, HyperParams())
        assert gram.size == 3
        assert np.array_equal(gram.block(1, 0), values[1:, :1])
        assert np.array_equal(gram.scaled(2.0).values, 2.0 * values)

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            Gram(np.zeros((2, 3)), [2], KernelKind.LINEAR, HyperParams())


class TestNc1Report:
    """Tests for Nc1Report."""

    def test_from_traces(self):
        report = Nc1Report.from_traces(1.0, 100.0)
        assert report.nc1 == pytest.approx(0.01)
        assert report.log10_nc1 == pytest.approx(-2.0)

    def test_zero_within_gives_negative_infinity(self):
        report = Nc1Report.from_traces(0.0, 2.0)
        assert report.nc1 == 0.0
        assert report.log10_nc1 == float("-inf")

    def test_with_data(self):
        report = Nc1Report.from_traces(1.0, 10.0, tau=1e-8).with_data(0.05)
        assert report.relative_nc1 == pytest.approx(0.1 / (0.05 + 1e-8))
        assert report.to_dict()["nc1_data"] == 0.05


class TestPredictorModels:
    """Tests for predictor value types."""

    def test_case_values_scaled(self):
        cases = CaseValues(v1=(1.0, 2.0), v2=(0.5, 1.5), v3=-1.0).scaled(2.0)
        assert cases.v1 == (2.0, 4.0)
        assert cases.v3 == -2.0

    def test_separation_ratios(self):
        p = GaussParams1D(mu1=-2.0, mu2=2.0, sigma1=0.5, sigma2=0.0, n1=1, n2=1)
        assert p.separation_ratios() == (4.0, float("inf"))
        assert p.n_total == 2

    def test_variant_from_name(self):
        assert DenominatorVariant.from_name("Appendix-D") is DenominatorVariant.APPENDIX_D
        with pytest.raises(ValidationError):
            DenominatorVariant.from_name("other")


class TestEosModels:
    """Tests for AnnealSchedule and SolverConfig."""

    def test_schedule_must_decrease(self):
        assert AnnealSchedule([1e5, 9e4]).target == 9e4
        with pytest.raises(ValidationError):
            AnnealSchedule([1e4, 2e4])
        with pytest.raises(ValidationError):
            AnnealSchedule([])

    def test_solver_config(self):
        SolverConfig().validate()
        with pytest.raises(ValidationError):
            SolverConfig(picard_damping=0.0).validate()
        with pytest.raises(ValidationError):
            SolverConfig(coordinates="K").validate()


class TestFcnModels:
    """Tests for FcnArchitecture and TrainConfig."""

    def test_uniform_widths(self):
        arch = FcnArchitecture.uniform(d0=3, depth=4, width=16)
        assert arch.widths == [3, 16, 16, 16, 1]
        assert arch.depth == 4

    @pytest.mark.parametrize("depth", [1, 7])
    def test_depth_range(self, depth):
        with pytest.raises(ValidationError):
            FcnArchitecture.uniform(d0=1, depth=depth, width=4)

    def test_train_config(self):
        TrainConfig().validate()
        with pytest.raises(ValidationError):
            TrainConfig(learning_rate=0.0).validate()


class TestSweepModels:
    """Tests for MethodSpec, SweepConfig and SweepResult."""

    def test_parse_methods(self):
        assert MethodSpec.parse("NNGP-Erf").label == "NNGP-Erf"
        assert MethodSpec.parse("EoS").label == "EoS-500"
        assert MethodSpec.parse({"eos": {"target": 2000}}).eos_target == 2000
        fcn = MethodSpec.parse({"fcn": {"activation": "relu", "depth": 3, "steps": 10}})
        assert fcn.label == "FCN-ReLU-L3"
        assert fcn.train.steps == 10
        with pytest.raises(ValidationError):
            MethodSpec.parse({"svm": {}})

    def test_expected_records(self):
        sweep = SweepConfig(
            profile="d1",
            n_grid=[128, 256, 512, 1024],
            d0_grid=[1, 2, 8, 32, 128],
            seeds=10,
            methods=[MethodSpec.parse("NNGP-Erf"), MethodSpec.parse("NTK-Erf")],
        )
        sweep.validate()
        assert sweep.expected_records == 400

    def test_duplicate_labels_rejected(self):
        sweep = SweepConfig(
            profile="d1", n_grid=[8], d0_grid=[1], seeds=1,
            methods=[MethodSpec.parse("NNGP-Erf"), MethodSpec.parse("nngp_erf")],
        )
        with pytest.raises(ValidationError):
            sweep.validate()

    def test_status_counts(self):
        sweep = SweepConfig(profile="d1", n_grid=[8], d0_grid=[1], seeds=2, methods=[MethodSpec.parse("Linear")])
        records = [
            SweepRecord("Linear", 8, 1, 0, 11, [4, 4], RecordStatus.OK),
            SweepRecord("Linear", 8, 1, 1, 12, [4, 4], RecordStatus.DEGENERATE, message="floor"),
        ]
        result = SweepResult(config=sweep, records=records)
        assert not result.all_ok
        assert result.status_counts() == {"ok": 1, "degenerate": 1, "non-converged": 0, "failed": 0}
        assert records[1].to_row()["nc1"] is None
        assert records[0].to_row()["partition"] == "4/4"


class TestConfig:
    """Tests for Config and Profile."""

    def test_profile_counts(self):
        balanced = Profile(means=[-2, 2], stds=[0.5, 0.5], labels=[-1, 1])
        assert balanced.counts(128) == [64, 64]
        with pytest.raises(ValidationError):
            balanced.counts(7)

        skewed = Profile(means=[-2, 2], stds=[0.5, 0.5], labels=[-1, 1], class_fractions=[0.125, 0.875])
        assert skewed.counts(2048) == [256, 1792]

        fixed = Profile(means=[-2, 2], stds=[0.5, 0.5], labels=[-1, 1], class_sizes=[3, 5])
        assert fixed.counts(None) == [3, 5]
        with pytest.raises(ValidationError):
            fixed.counts(10)

    def test_from_dict(self):
        config = Config.from_dict(
            {
                "hyper": {"sigma_w2": 2.0},
                "eos": {"sigma2": 0.01, "solver": {"tolerance": 1e-8}},
                "fcn": {"presets": {"erf": {"learning_rate": 0.1}}},
                "profiles": {"d1": {"means": [-2, 2], "stds": [0.5, 0.5], "labels": [-1, 1]}},
            }
        )
        assert config.hyper.sigma_w2 == 2.0
        assert config.eos.solver.tolerance == 1e-8
        assert config.fcn.preset("erf").learning_rate == 0.1
        assert config.profile("d1").counts(4) == [2, 2]
        with pytest.raises(ValidationError):
            config.profile("missing")
