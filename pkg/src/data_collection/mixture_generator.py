"""
Parameterized Gaussian classification datasets in organized matrix form.
"""

from typing import List, Optional, Sequence

import numpy as np

from src.models.config import Config
from src.models.dataset import Dataset, DatasetMeta, MixtureSpec
from src.utils.exceptions import ValidationError
from src.utils.logger import get_logger
from src.utils.rng import standard_normal, stream

logger = get_logger(__name__)

D1_MEANS = (-2.0, 2.0)
D1_LABELS = (-1.0, 1.0)
D2_MEANS = (-6.0, -2.0, 2.0, 6.0)
D2_LABELS = (-3.0, -1.0, 1.0, 3.0)
PRESET_STD = 0.5


def sample_gaussian_mixture(
    spec: MixtureSpec,
    seed: int,
    preset: Optional[str] = None,
) -> Dataset:
    """
    Draw every class block from N(mu_c * 1, sigma_c^2 I).

    Class c reads from its own stream keyed by (seed, c), so a block does not
    change when other classes are resized or added.
    """
    spec.validate()
    blocks: List[np.ndarray] = []
    labels: List[np.ndarray] = []
    for index, entry in enumerate(spec.classes):
        generator = stream(seed, index)
        noise = standard_normal(generator, (entry.count, spec.d0)).T
        blocks.append(entry.mean(spec.d0)[:, None] + entry.std * noise)
        labels.append(np.full(entry.count, entry.label))

    dataset = Dataset(
        X=np.concatenate(blocks, axis=1),
        labels=np.concatenate(labels),
        partition=[c.count for c in spec.classes],
        meta=DatasetMeta(
            means=[c.mean_scale for c in spec.classes],
            stds=[c.std for c in spec.classes],
            seed=int(seed),
            preset=preset,
        ),
    )
    logger.debug(
        f"Sampled dataset d0={dataset.d0} N={dataset.n_samples} partition={dataset.partition} seed={seed}"
    )
    return dataset


def d1_spec(n_samples: int, d0: int) -> MixtureSpec:
    if n_samples % 2:
        raise ValidationError(f"D1 needs an even N, got {n_samples}")
    half = n_samples // 2
    return MixtureSpec.from_lists(D1_MEANS, (PRESET_STD,) * 2, (half, half), D1_LABELS, d0)


def make_d1(n_samples: int, d0: int, seed: int) -> Dataset:
    return sample_gaussian_mixture(d1_spec(n_samples, d0), seed, preset="d1")


def make_d2(n_samples: int, d0: int, seed: int) -> Dataset:
    if n_samples % 4:
        raise ValidationError(f"D2 needs N divisible by 4, got {n_samples}")
    quarter = n_samples // 4
    spec = MixtureSpec.from_lists(D2_MEANS, (PRESET_STD,) * 4, (quarter,) * 4, D2_LABELS, d0)
    return sample_gaussian_mixture(spec, seed, preset="d2")


def make_imbalanced(class_sizes: Sequence[int], spec: MixtureSpec, seed: int) -> Dataset:
    """Same mixture as ``spec`` with per-class counts replaced by ``class_sizes``."""
    return sample_gaussian_mixture(spec.with_counts(class_sizes), seed, preset="imbalanced")


class MixtureGenerator:
    """Builds datasets from the named profiles of the configuration."""

    def __init__(self, config: Config):
        self.config = config
        logger.debug(f"MixtureGenerator initialized with profiles: {sorted(config.profiles)}")

    def make_preset(
        self,
        name: str,
        n_samples: Optional[int],
        d0: int,
        seed: int,
        class_sizes: Optional[Sequence[int]] = None,
    ) -> Dataset:
        profile = self.config.profile(name)
        spec = profile.to_mixture(
            n_samples if class_sizes is None else sum(class_sizes), d0
        )
        if class_sizes is not None:
            spec = spec.with_counts(class_sizes)
        return sample_gaussian_mixture(spec, seed, preset=name)
