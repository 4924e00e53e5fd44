from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional

import numpy as np

from src.utils.exceptions import ValidationError


class Activation(str, Enum):
    ERF = "erf"
    RELU = "relu"

    @classmethod
    def from_name(cls, name: str) -> "Activation":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValidationError(f"Unknown activation: {name}") from None


class KernelKind(str, Enum):
    LINEAR = "linear"
    NNGP_ERF = "nngp-erf"
    NNGP_RELU = "nngp-relu"
    NTK_ERF = "ntk-erf"
    NTK_RELU = "ntk-relu"

    @property
    def activation(self) -> Optional[Activation]:
        if self is KernelKind.LINEAR:
            return None
        return Activation.ERF if self.value.endswith("erf") else Activation.RELU

    @property
    def is_ntk(self) -> bool:
        return self.value.startswith("ntk")

    @property
    def label(self) -> str:
        """Display name, e.g. ``NNGP-Erf``."""
        if self is KernelKind.LINEAR:
            return "Linear"
        family, act = self.value.split("-")
        return f"{family.upper()}-{'Erf' if act == 'erf' else 'ReLU'}"

    @classmethod
    def from_name(cls, name: str) -> "KernelKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValidationError(f"Unknown kernel kind: {name}")


@dataclass
class HyperParams:
    sigma_w2: float = 1.0
    sigma_b2: float = 0.0
    d0: int = 1
    sigma_a2: float = 1.0 / 128.0

    def validate(self) -> None:
        if not self.sigma_w2 > 0:
            raise ValidationError(f"sigma_w2 must be > 0, got {self.sigma_w2}")
        if self.sigma_b2 < 0:
            raise ValidationError(f"sigma_b2 must be >= 0, got {self.sigma_b2}")
        if self.d0 < 1:
            raise ValidationError(f"d0 must be >= 1, got {self.d0}")
        if not self.sigma_a2 > 0:
            raise ValidationError(f"sigma_a2 must be > 0, got {self.sigma_a2}")

    def with_d0(self, d0: int) -> "HyperParams":
        return replace(self, d0=int(d0))

    def to_dict(self) -> dict:
        return {
            "sigma_w2": self.sigma_w2,
            "sigma_b2": self.sigma_b2,
            "d0": self.d0,
            "sigma_a2": self.sigma_a2,
        }


@dataclass
class Gram:
    values: np.ndarray
    partition: List[int]
    kind: KernelKind
    hyper: HyperParams

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.partition = [int(n) for n in self.partition]
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValidationError(f"Gram must be square, got shape {self.values.shape}")
        if any(n < 1 for n in self.partition) or sum(self.partition) != self.values.shape[0]:
            raise ValidationError(
                f"Partition {self.partition} inconsistent with a {self.values.shape[0]}x{self.values.shape[0]} gram"
            )

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def class_slices(self) -> List[slice]:
        bounds = np.concatenate([[0], np.cumsum(self.partition)])
        return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]

    def block(self, c: int, c_prime: int) -> np.ndarray:
        slices = self.class_slices()
        return self.values[slices[c], slices[c_prime]]

    def scaled(self, factor: float) -> "Gram":
        return Gram(self.values * factor, list(self.partition), self.kind, self.hyper)
