from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from src.models.kernel import Activation
from src.models.report import Nc1Report
from src.utils.exceptions import ValidationError


@dataclass
class FcnArchitecture:
    """Layer widths d_0..d_L of a fully connected net with a scalar output."""

    widths: List[int]
    activation: Activation = Activation.ERF
    sigma_w2: float = 1.0
    sigma_b2: float = 0.0

    def __post_init__(self):
        self.widths = [int(w) for w in self.widths]
        if isinstance(self.activation, str):
            self.activation = Activation.from_name(self.activation)
        if not 2 <= self.depth <= 6:
            raise ValidationError(f"Depth must lie in 2..6, got {self.depth}")
        if any(w < 1 for w in self.widths):
            raise ValidationError(f"Layer widths must be >= 1: {self.widths}")
        if self.widths[-1] != 1:
            raise ValidationError(f"Output width must be 1, got {self.widths[-1]}")
        if not self.sigma_w2 > 0 or self.sigma_b2 < 0:
            raise ValidationError("Need sigma_w2 > 0 and sigma_b2 >= 0")

    @property
    def depth(self) -> int:
        return len(self.widths) - 1

    @classmethod
    def uniform(
        cls,
        d0: int,
        depth: int = 2,
        width: int = 500,
        activation: Activation = Activation.ERF,
        sigma_w2: float = 1.0,
        sigma_b2: float = 0.0,
    ) -> "FcnArchitecture":
        return cls(
            widths=[d0] + [width] * (depth - 1) + [1],
            activation=activation,
            sigma_w2=sigma_w2,
            sigma_b2=sigma_b2,
        )


@dataclass
class FcnModel:
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: Activation

    def __post_init__(self):
        if len(self.weights) != len(self.biases):
            raise ValidationError("Every layer needs one weight matrix and one bias vector")
        for index, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.shape != (W.shape[0],):
                raise ValidationError(f"Layer {index + 1}: weight {W.shape} and bias {b.shape} disagree")
            if index > 0 and W.shape[1] != self.weights[index - 1].shape[0]:
                raise ValidationError(f"Layer {index + 1} input width does not match layer {index}")

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def widths(self) -> List[int]:
        return [self.weights[0].shape[1]] + [W.shape[0] for W in self.weights]

    def parameters(self) -> List[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def copy(self) -> "FcnModel":
        return FcnModel(
            weights=[W.copy() for W in self.weights],
            biases=[b.copy() for b in self.biases],
            activation=self.activation,
        )


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    weight_decay: float = 1e-6
    steps: int = 1000
    seed: int = 0
    log_every: int = 100
    divergence_factor: float = 1e6

    def validate(self) -> None:
        if not self.learning_rate > 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise ValidationError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")


@dataclass
class TrainTrace:
    loss: List[float] = field(default_factory=list)
    accuracy: List[float] = field(default_factory=list)
    final_nc1: Optional[Nc1Report] = None

    def append(self, loss: float, accuracy: float) -> None:
        self.loss.append(float(loss))
        self.accuracy.append(float(accuracy))

    def __len__(self) -> int:
        return len(self.loss)

    def steps(self) -> Sequence[int]:
        return range(1, len(self.loss) + 1)
