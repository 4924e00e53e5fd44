"""
Within-class variability collapse (NC1) from kernel grams and from features.

The gram path evaluates the traces of the within- and between-class
covariances from block sums of the kernel matrix alone. The feature path
builds the covariance matrices explicitly and serves as its oracle.

Within-class scatter is averaged over samples (1/N) and between-class
scatter over classes (1/C), with class means centred on the global mean.
On balanced partitions the gram traces reduce to the familiar
class-block-average form.
"""

from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from src.models.dataset import Dataset
from src.models.kernel import Gram
from src.models.report import Nc1Report
from src.utils.exceptions import CalculationError, DegenerateBetweenVariance, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_TAU = 1e-8
DEGENERACY_FLOOR = 1e-30
PSD_TOLERANCE = 1e-8


class Traces(NamedTuple):
    """tr of the total second moment, its size-weighted class-mean part, and the between-class covariance."""

    total: float
    class_means: float
    between: float

    @property
    def within(self) -> float:
        return self.total - self.class_means


def _starts(partition: Sequence[int]) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(partition)[:-1]]).astype(int)


def class_block_sums(values: np.ndarray, partition: Sequence[int]) -> np.ndarray:
    """C x C matrix of block sums: entry (c, c') sums Q over class c rows and class c' columns."""
    starts = _starts(partition)
    return np.add.reduceat(np.add.reduceat(values, starts, axis=0), starts, axis=1)


def gram_traces(gram: Gram) -> Traces:
    """
    Covariance traces from class block sums S of the gram.

    With n_c the class sizes, S_c the row sums of S and S_tot its total:
    tr SigmaW = tr(Q)/N - sum_c S_cc/(n_c N) and
    tr SigmaB = (1/C) sum_c [S_cc/n_c^2 - 2 S_c/(n_c N)] + S_tot/N^2.
    """
    values = gram.values
    counts = np.asarray(gram.partition, dtype=np.float64)
    n_total = counts.sum()
    n_classes = len(counts)

    blocks = class_block_sums(values, gram.partition)
    diagonal = np.diag(blocks)
    total = float(np.trace(values) / n_total)
    class_means = float(np.sum(diagonal / counts) / n_total)
    between = float(
        np.sum(diagonal / counts ** 2 - 2.0 * blocks.sum(axis=1) / (counts * n_total)) / n_classes
        + blocks.sum() / n_total ** 2
    )
    return Traces(total, class_means, between)


def _check_nonnegative(value: float, scale: float, what: str) -> float:
    """Round PSD-tolerance negatives up to zero; anything further below is an error."""
    if value >= 0:
        return value
    if value >= -PSD_TOLERANCE * max(scale, 1.0):
        return 0.0
    raise CalculationError(f"{what} trace {value:.6g} is negative beyond tolerance; gram not PSD?")


def trace_within(gram: Gram) -> float:
    return gram_traces(gram).within


def trace_between(gram: Gram) -> float:
    return gram_traces(gram).between


def _report(traces: Traces, scale: float, tau: float, floor: float) -> Nc1Report:
    tr_within = _check_nonnegative(traces.within, scale, "within-class")
    tr_between = _check_nonnegative(traces.between, scale, "between-class")
    if tr_between <= floor:
        raise DegenerateBetweenVariance(
            f"Between-class trace {tr_between:.6g} is at or below the degeneracy floor {floor:g}"
        )
    report = Nc1Report.from_traces(tr_within, tr_between, tau=tau)
    report.tr_total = float(traces.total)
    report.tr_between_noncentred = float(traces.class_means)
    return report


def nc1_of_gram(gram: Gram, tau: float = DEFAULT_TAU, floor: float = DEGENERACY_FLOOR) -> Nc1Report:
    scale = float(np.max(np.abs(gram.values))) if gram.size else 0.0
    return _report(gram_traces(gram), scale, tau, floor)


def covariance_matrices(H: np.ndarray, partition: Sequence[int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Explicit d x d covariances of the rows of ``H`` (N x d).

    Returns (within-class, between-class, non-centred total). Within-class
    deviations are taken from each class mean and averaged over all N rows;
    class means are centred on the global mean and averaged over classes.
    """
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2:
        raise ValidationError(f"Features must be an N x d matrix, got shape {H.shape}")
    partition = [int(n) for n in partition]
    if any(n < 1 for n in partition) or sum(partition) != H.shape[0]:
        raise ValidationError(f"Partition {partition} does not match N={H.shape[0]}")

    n_total = H.shape[0]
    bounds = np.concatenate([[0], np.cumsum(partition)])
    class_means = np.stack([H[a:b].mean(axis=0) for a, b in zip(bounds[:-1], bounds[1:])])
    global_mean = H.mean(axis=0)

    deviations = H - np.repeat(class_means, partition, axis=0)
    centred_means = class_means - global_mean
    sigma_w = deviations.T @ deviations / n_total
    sigma_b = centred_means.T @ centred_means / len(partition)
    total = H.T @ H / n_total
    return sigma_w, sigma_b, total


def nc1_of_features(
    H: np.ndarray,
    partition: Sequence[int],
    tau: float = DEFAULT_TAU,
    floor: float = DEGENERACY_FLOOR,
) -> Nc1Report:
    sigma_w, sigma_b, total = covariance_matrices(H, partition)
    tr_total = float(np.trace(total))
    tr_within = float(np.trace(sigma_w))
    traces = Traces(total=tr_total, class_means=tr_total - tr_within, between=float(np.trace(sigma_b)))
    scale = float(np.max(np.abs(total))) if total.size else 0.0
    return _report(traces, scale, tau, floor)


def data_nc1(dataset: Dataset, tau: float = DEFAULT_TAU, floor: float = DEGENERACY_FLOOR) -> Nc1Report:
    """NC1 of the raw inputs (identity feature map)."""
    return nc1_of_features(dataset.X.T, dataset.partition, tau=tau, floor=floor)


def relative_nc1(gram: Gram, dataset: Dataset, tau: float = DEFAULT_TAU) -> float:
    return nc1_relative_report(gram, dataset, tau).relative_nc1


def nc1_relative_report(
    gram: Gram,
    dataset: Dataset,
    tau: float = DEFAULT_TAU,
    floor: float = DEGENERACY_FLOOR,
) -> Nc1Report:
    """Gram NC1 with the data NC1 and their ratio filled in."""
    if not tau > 0:
        raise ValidationError(f"tau must be > 0, got {tau}")
    if list(gram.partition) != list(dataset.partition):
        raise ValidationError(
            f"Gram partition {gram.partition} differs from dataset partition {dataset.partition}"
        )
    report = nc1_of_gram(gram, tau=tau, floor=floor)
    return report.with_data(data_nc1(dataset, tau=tau, floor=floor).nc1)


def features_relative_report(
    H: np.ndarray,
    dataset: Dataset,
    tau: float = DEFAULT_TAU,
    floor: float = DEGENERACY_FLOOR,
) -> Nc1Report:
    """Feature NC1 (e.g. penultimate FCN activations, N x d) relative to the data."""
    report = nc1_of_features(H, dataset.partition, tau=tau, floor=floor)
    return report.with_data(data_nc1(dataset, tau=tau, floor=floor).nc1)


def aggregate_log10(reports: List[Nc1Report]) -> Tuple[float, float]:
    """Mean and sample standard deviation of log10 NC1 over finite reports."""
    values = np.array([r.log10_nc1 for r in reports if np.isfinite(r.log10_nc1)], dtype=np.float64)
    if values.size == 0:
        return float("nan"), float("nan")
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return float(values.mean()), std
