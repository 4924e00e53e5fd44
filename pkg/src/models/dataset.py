from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.exceptions import ValidationError


@dataclass(frozen=True)
class ClassSpec:
    mean_scale: float
    std: float
    count: int
    label: float
    mean_vector: Optional[Tuple[float, ...]] = None

    def mean(self, d0: int) -> np.ndarray:
        if self.mean_vector is not None:
            return np.asarray(self.mean_vector, dtype=np.float64)
        return np.full(d0, float(self.mean_scale))


@dataclass
class MixtureSpec:
    """Isotropic Gaussian mixture, one entry per class, classes in column order."""

    classes: List[ClassSpec]
    d0: int

    def validate(self) -> None:
        if self.d0 < 1:
            raise ValidationError(f"d0 must be >= 1, got {self.d0}")
        if not self.classes:
            raise ValidationError("MixtureSpec needs at least one class")
        labels = [c.label for c in self.classes]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"Class labels must be pairwise distinct, got {labels}")
        for index, entry in enumerate(self.classes):
            if entry.count < 1:
                raise ValidationError(f"Class {index} has count {entry.count}; every class needs >= 1 sample")
            if not entry.std > 0:
                raise ValidationError(f"Class {index} has std {entry.std}; std must be > 0")
            if entry.mean_vector is not None and len(entry.mean_vector) != self.d0:
                raise ValidationError(
                    f"Class {index} mean vector has length {len(entry.mean_vector)}, expected {self.d0}"
                )

    def with_counts(self, counts: Sequence[int]) -> "MixtureSpec":
        if len(counts) != len(self.classes):
            raise ValidationError(
                f"Got {len(counts)} class sizes for a {len(self.classes)}-class spec"
            )
        return MixtureSpec(
            classes=[replace(c, count=int(n)) for c, n in zip(self.classes, counts)],
            d0=self.d0,
        )

    @property
    def n_samples(self) -> int:
        return sum(c.count for c in self.classes)

    @classmethod
    def from_lists(
        cls,
        means: Sequence[float],
        stds: Sequence[float],
        counts: Sequence[int],
        labels: Sequence[float],
        d0: int,
    ) -> "MixtureSpec":
        if not len(means) == len(stds) == len(counts) == len(labels):
            raise ValidationError("means, stds, counts and labels must have equal length")
        return cls(
            classes=[
                ClassSpec(mean_scale=float(m), std=float(s), count=int(n), label=float(y))
                for m, s, n, y in zip(means, stds, counts, labels)
            ],
            d0=int(d0),
        )


@dataclass
class DatasetMeta:
    means: List[float]
    stds: List[float]
    seed: int
    preset: Optional[str] = None


@dataclass
class Dataset:
    """
    Samples in organized matrix form.

    ``X`` is d0 x N with the columns of class c stored contiguously in class
    order; ``labels`` holds one scalar target per column.
    """

    X: np.ndarray
    labels: np.ndarray
    partition: List[int]
    meta: DatasetMeta = field(default_factory=lambda: DatasetMeta(means=[], stds=[], seed=0))

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        self.partition = [int(n) for n in self.partition]
        if self.X.ndim != 2:
            raise ValidationError(f"X must be a d0 x N matrix, got shape {self.X.shape}")
        if any(n < 1 for n in self.partition):
            raise ValidationError(f"Every class needs >= 1 sample, got partition {self.partition}")
        if sum(self.partition) != self.X.shape[1]:
            raise ValidationError(
                f"Partition {self.partition} does not sum to N={self.X.shape[1]}"
            )
        if self.labels.shape != (self.X.shape[1],):
            raise ValidationError(
                f"Expected {self.X.shape[1]} labels, got shape {self.labels.shape}"
            )

    @property
    def d0(self) -> int:
        return self.X.shape[0]

    @property
    def n_samples(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.partition)

    def class_slices(self) -> List[slice]:
        bounds = np.concatenate([[0], np.cumsum(self.partition)])
        return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]

    def class_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_classes), self.partition)

    def class_labels(self) -> List[float]:
        return [float(self.labels[s.start]) for s in self.class_slices()]

    def header(self) -> Dict[str, Any]:
        return {
            "d0": self.d0,
            "N": self.n_samples,
            "partition": list(self.partition),
            "labels": self.class_labels(),
            "meta": {
                "means": list(self.meta.means),
                "stds": list(self.meta.stds),
                "seed": int(self.meta.seed),
                "preset": self.meta.preset,
            },
            "seed": int(self.meta.seed),
        }
