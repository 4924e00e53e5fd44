"""
Counter-based random streams.

Every stream is a Philox generator keyed by a SeedSequence, so the draws for a
given (seed, trial, class) key do not depend on which worker produced them or
in what order. Gaussian variates always go through the inverse normal CDF.
"""

from typing import Sequence, Tuple, Union

import numpy as np
from scipy.special import ndtri

_MANTISSA = 2 ** 53

Shape = Union[int, Tuple[int, ...]]


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator for ``seed`` spawned along ``keys``."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(master_seed: int, keys: Sequence[int]) -> int:
    """Deterministic 63-bit child seed of ``master_seed`` for a key tuple."""
    sequence = np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def open_uniform(generator: np.random.Generator, shape: Shape) -> np.ndarray:
    """Uniform draws on the open interval (0, 1) with 53-bit resolution."""
    draws = generator.integers(0, _MANTISSA, size=shape, dtype=np.int64)
    return (draws.astype(np.float64) + 0.5) / _MANTISSA


def standard_normal(generator: np.random.Generator, shape: Shape) -> np.ndarray:
    """Standard normal draws through the inverse CDF."""
    return ndtri(open_uniform(generator, shape))
