from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.models.fcn import TrainConfig
from src.models.kernel import Activation, HyperParams, KernelKind
from src.models.report import Nc1Report
from src.utils.exceptions import ValidationError


class RecordStatus(str, Enum):
    OK = "ok"
    DEGENERATE = "degenerate"
    NON_CONVERGED = "non-converged"
    FAILED = "failed"


@dataclass
class MethodSpec:
    """One column of a sweep: a closed-form kernel, an EoS solve or an FCN run."""

    family: str
    kind: Optional[KernelKind] = None
    eos_target: Optional[int] = None
    depth: int = 2
    width: int = 500
    activation: Activation = Activation.ERF
    train: Optional[TrainConfig] = None

    @property
    def label(self) -> str:
        if self.family == "kernel":
            return self.kind.label
        if self.family == "eos":
            return f"EoS-{self.eos_target}"
        act = "Erf" if self.activation is Activation.ERF else "ReLU"
        return f"FCN-{act}-L{self.depth}"

    @classmethod
    def parse(cls, entry: Union[str, Dict[str, Any]]) -> "MethodSpec":
        """
        Accepts ``"NNGP-Erf"``, ``"EoS"``, ``{"eos": {"target": 500}}`` or
        ``{"fcn": {"activation": "erf", "depth": 3, "steps": 1000, ...}}``.
        """
        if isinstance(entry, str):
            name = entry.strip()
            if name.lower() == "eos":
                return cls(family="eos", eos_target=500)
            if name.lower() == "fcn":
                return cls(family="fcn")
            return cls(family="kernel", kind=KernelKind.from_name(name))
        if not isinstance(entry, dict) or len(entry) != 1:
            raise ValidationError(f"Cannot parse method entry: {entry!r}")
        key, body = next(iter(entry.items()))
        body = dict(body or {})
        key = str(key).lower()
        if key == "eos":
            return cls(family="eos", eos_target=int(body.get("target", 500)))
        if key == "fcn":
            train_fields = {k: body.pop(k) for k in list(body) if k in TrainConfig.__dataclass_fields__}
            return cls(
                family="fcn",
                depth=int(body.get("depth", 2)),
                width=int(body.get("width", 500)),
                activation=Activation.from_name(body.get("activation", "erf")),
                train=TrainConfig(**train_fields) if train_fields else None,
            )
        if key == "kernel":
            return cls(family="kernel", kind=KernelKind.from_name(body["kind"]))
        raise ValidationError(f"Unknown method family: {key}")


@dataclass
class SweepConfig:
    profile: str
    n_grid: List[int]
    d0_grid: List[int]
    seeds: int
    methods: List[MethodSpec]
    hyper: HyperParams = field(default_factory=HyperParams)
    output_dir: Path = Path("output")
    master_seed: int = 0
    workers: int = 1
    eos_sigma2: float = 1e-3
    class_sizes: Optional[List[int]] = None

    def validate(self) -> None:
        if not self.n_grid or not self.d0_grid:
            raise ValidationError("Sweep grids must be nonempty")
        if self.seeds < 1:
            raise ValidationError(f"Seed count must be >= 1, got {self.seeds}")
        if not self.methods:
            raise ValidationError("Sweep needs at least one method")
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"Method labels must be unique, got {labels}")
        if self.workers < 1:
            raise ValidationError(f"Worker count must be >= 1, got {self.workers}")

    @property
    def expected_records(self) -> int:
        return len(self.methods) * len(self.n_grid) * len(self.d0_grid) * self.seeds


@dataclass
class SweepRecord:
    method: str
    N: int
    d0: int
    seed_index: int
    seed: int
    partition: List[int]
    status: RecordStatus
    report: Optional[Nc1Report] = None
    elapsed_s: float = 0.0
    message: str = ""

    def to_row(self) -> Dict[str, Any]:
        report = self.report
        return {
            "method": self.method,
            "N": self.N,
            "d0": self.d0,
            "seed_index": self.seed_index,
            "seed": self.seed,
            "partition": "/".join(str(n) for n in self.partition),
            "status": self.status.value,
            "tr_within": report.tr_within if report else None,
            "tr_between": report.tr_between if report else None,
            "nc1": report.nc1 if report else None,
            "log10_nc1": report.log10_nc1 if report else None,
            "nc1_data": report.nc1_data if report else None,
            "relative_nc1": report.relative_nc1 if report else None,
            "message": self.message,
        }


@dataclass
class SweepResult:
    config: SweepConfig
    records: List[SweepRecord] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(r.status is RecordStatus.OK for r in self.records)

    def status_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {status.value: 0 for status in RecordStatus}
        for record in self.records:
            counts[record.status.value] += 1
        return counts
