from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.models.dataset import MixtureSpec
from src.models.eos import SolverConfig
from src.models.fcn import TrainConfig
from src.models.kernel import HyperParams
from src.utils.exceptions import ValidationError


@dataclass
class Profile:
    """Named dataset preset; class counts come from fractions of N or fixed sizes."""

    means: List[float]
    stds: List[float]
    labels: List[float]
    class_fractions: Optional[List[float]] = None
    class_sizes: Optional[List[int]] = None

    def counts(self, n_samples: Optional[int]) -> List[int]:
        n_classes = len(self.means)
        if self.class_sizes is not None:
            sizes = [int(n) for n in self.class_sizes]
            if n_samples is not None and n_samples != sum(sizes):
                raise ValidationError(
                    f"Profile has fixed class sizes {sizes}; N={n_samples} does not match"
                )
            return sizes
        if n_samples is None:
            raise ValidationError("N is required for profiles without fixed class sizes")
        if self.class_fractions is None:
            if n_samples % n_classes:
                raise ValidationError(f"N={n_samples} is not divisible by {n_classes} classes")
            return [n_samples // n_classes] * n_classes
        head = [int(round(f * n_samples)) for f in self.class_fractions[:-1]]
        sizes = head + [n_samples - sum(head)]
        if any(n < 1 for n in sizes):
            raise ValidationError(f"Fractions {self.class_fractions} leave an empty class at N={n_samples}")
        return sizes

    def to_mixture(self, n_samples: Optional[int], d0: int) -> MixtureSpec:
        return MixtureSpec.from_lists(self.means, self.stds, self.counts(n_samples), self.labels, d0)


@dataclass
class Nc1Settings:
    tau: float = 1e-8
    degeneracy_floor: float = 1e-30


@dataclass
class EosSettings:
    sigma2: float = 1e-3
    target_d1: int = 500
    schedule: Optional[List[float]] = None
    solver: SolverConfig = field(default_factory=SolverConfig)


@dataclass
class FcnSettings:
    width: int = 500
    depth: int = 2
    presets: Dict[str, TrainConfig] = field(default_factory=dict)

    def preset(self, name: str) -> TrainConfig:
        if name not in self.presets:
            raise ValidationError(f"Unknown training preset: {name}")
        return self.presets[name]


@dataclass
class SweepDefaults:
    profile: str = "d1"
    n_grid: List[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    d0_grid: List[int] = field(default_factory=lambda: [1, 2, 8, 32, 128])
    seeds: int = 10
    methods: List[Any] = field(default_factory=lambda: ["NNGP-Erf", "NTK-Erf"])
    workers: int = 1


@dataclass
class VerifySettings:
    theorem1_instances: int = 100
    mc_pairs: int = 1_000_000
    mc_draws: int = 10
    n_samples: int = 1024
    relu_mu: float = 2.0
    relu_sigma: float = 0.5
    erf_mu: float = 4.0
    erf_sigma: float = 0.25
    assumption_ratio: float = 3.0
    gradient_instances: int = 5
    ntk_d0_grid: List[int] = field(default_factory=lambda: [1, 2, 8, 32, 128])
    nonseparable_n: int = 1024
    nonseparable_d0_grid: List[int] = field(default_factory=lambda: [8, 16, 32, 64, 128])
    nonseparable_split_d0: int = 64


@dataclass
class Visualization:
    output_format: List[str] = field(default_factory=lambda: ["svg"])
    theme: str = "plotly_white"
    colorscale: str = "Viridis"
    width: int = 640
    height: int = 520


@dataclass
class Config:
    hyper: HyperParams = None
    nc1: Nc1Settings = None
    eos: EosSettings = None
    fcn: FcnSettings = None
    sweep: SweepDefaults = None
    verify: VerifySettings = None
    visualization: Visualization = None
    profiles: Dict[str, Profile] = None

    def __post_init__(self):
        if self.hyper is None:
            self.hyper = HyperParams()
        if self.nc1 is None:
            self.nc1 = Nc1Settings()
        if self.eos is None:
            self.eos = EosSettings()
        if self.fcn is None:
            self.fcn = FcnSettings()
        if self.sweep is None:
            self.sweep = SweepDefaults()
        if self.verify is None:
            self.verify = VerifySettings()
        if self.visualization is None:
            self.visualization = Visualization()
        if self.profiles is None:
            self.profiles = {}

    def profile(self, name: str) -> Profile:
        if name not in self.profiles:
            raise ValidationError(
                f"Unknown dataset profile '{name}'; available: {sorted(self.profiles)}"
            )
        return self.profiles[name]

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        hyper = HyperParams(**data.get("hyper", {}))
        nc1 = Nc1Settings(**data.get("nc1", {}))

        eos_data = dict(data.get("eos", {}))
        solver = SolverConfig(**eos_data.pop("solver", {}))
        eos = EosSettings(solver=solver, **eos_data)

        fcn_data = dict(data.get("fcn", {}))
        presets = {
            name: TrainConfig(**values)
            for name, values in fcn_data.pop("presets", {}).items()
        }
        fcn = FcnSettings(presets=presets, **fcn_data)

        sweep = SweepDefaults(**data.get("sweep", {}))
        verify = VerifySettings(**data.get("verify", {}))
        visualization = Visualization(**data.get("visualization", {}))

        profiles = {
            name: Profile(**values) for name, values in data.get("profiles", {}).items()
        }

        return cls(
            hyper=hyper,
            nc1=nc1,
            eos=eos,
            fcn=fcn,
            sweep=sweep,
            verify=verify,
            visualization=visualization,
            profiles=profiles,
        )
