"""
Closed-form limiting kernels of a single-hidden-layer network and their grams.

All kernels are written in terms of the pre-activation kernel
K(x, y) = sigma_b^2 + (sigma_w^2 / d0) <x, y>; the post-activation (NNGP)
kernel Q, its derivative kernel Q_dot and the NTK
Theta = sigma_b^2 + sigma_w^2 Q + K Q_dot follow elementwise.
"""

from typing import Tuple, Union

import numpy as np

from src.models.dataset import Dataset
from src.models.kernel import Activation, Gram, HyperParams, KernelKind
from src.utils.exceptions import CalculationError, DegenerateInputError, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

CLAMP_TOL = 1e-12

ArrayLike = Union[float, np.ndarray]


def clamp_unit(values: ArrayLike, what: str = "correlation") -> np.ndarray:
    """Clip into [-1, 1]; anything further out than CLAMP_TOL is an error."""
    values = np.asarray(values, dtype=np.float64)
    excess = np.abs(values) - 1.0
    if np.any(excess > CLAMP_TOL):
        raise CalculationError(
            f"{what} outside [-1, 1] beyond tolerance (max |value| = {np.max(np.abs(values)):.17g})"
        )
    return np.clip(values, -1.0, 1.0)


def _as_vector(x: ArrayLike) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=np.float64))


def _check_pair(x: np.ndarray, y: np.ndarray, hyper: HyperParams) -> None:
    if x.ndim != 1 or x.shape != y.shape:
        raise ValidationError(f"Input shapes differ: {x.shape} vs {y.shape}")
    if x.shape[0] != hyper.d0:
        raise ValidationError(f"Inputs have dimension {x.shape[0]}, hyper.d0 = {hyper.d0}")


# ---------------------------------------------------------------------------
# elementwise closed forms on (K_xy, K_xx, K_yy)
# ---------------------------------------------------------------------------

def erf_correlation(kxy: ArrayLike, kxx: ArrayLike, kyy: ArrayLike) -> np.ndarray:
    """u = 2 K_xy / sqrt((1 + 2 K_xx)(1 + 2 K_yy)), clamped."""
    kxy = np.asarray(kxy, dtype=np.float64)
    return clamp_unit(2.0 * kxy / np.sqrt((1.0 + 2.0 * np.asarray(kxx)) * (1.0 + 2.0 * np.asarray(kyy))))


def erf_q(kxy: ArrayLike, kxx: ArrayLike, kyy: ArrayLike) -> np.ndarray:
    return (2.0 / np.pi) * np.arcsin(erf_correlation(kxy, kxx, kyy))


def erf_q_dot(kxy: ArrayLike, kxx: ArrayLike, kyy: ArrayLike) -> np.ndarray:
    kxy = np.asarray(kxy, dtype=np.float64)
    det = (1.0 + 2.0 * np.asarray(kxx)) * (1.0 + 2.0 * np.asarray(kyy)) - 4.0 * kxy ** 2
    if np.any(det <= 0):
        raise CalculationError("Erf derivative kernel has a non-positive determinant")
    return (4.0 / np.pi) / np.sqrt(det)


def relu_angle(kxy: ArrayLike, kxx: ArrayLike, kyy: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Angle theta = arccos(K_xy / sqrt(K_xx K_yy)) and the norm product sqrt(K_xx K_yy)."""
    prod = np.asarray(kxx, dtype=np.float64) * np.asarray(kyy, dtype=np.float64)
    if np.any(prod <= 0):
        raise DegenerateInputError("ReLU kernel angle undefined for a zero-norm input")
    norm = np.sqrt(prod)
    theta = np.arccos(clamp_unit(np.asarray(kxy, dtype=np.float64) / norm, what="cosine"))
    return theta, norm


def relu_q(kxy: ArrayLike, kxx: ArrayLike, kyy: ArrayLike) -> np.ndarray:
    theta, norm = relu_angle(kxy, kxx, kyy)
    return norm / (2.0 * np.pi) * (np.sin(theta) + (np.pi - theta) * np.cos(theta))


def relu_q_dot(kxy: ArrayLike, kxx: ArrayLike, kyy: ArrayLike) -> np.ndarray:
    theta, _ = relu_angle(kxy, kxx, kyy)
    return (np.pi - theta) / (2.0 * np.pi)


_Q = {Activation.ERF: erf_q, Activation.RELU: relu_q}
_Q_DOT = {Activation.ERF: erf_q_dot, Activation.RELU: relu_q_dot}


def kernel_from_pre(
    kind: KernelKind,
    kxy: ArrayLike,
    kxx: ArrayLike,
    kyy: ArrayLike,
    hyper: HyperParams,
) -> np.ndarray:
    """Evaluate a non-linear kernel kind from pre-activation values."""
    q = _Q[kind.activation](kxy, kxx, kyy)
    if not kind.is_ntk:
        return q
    q_dot = _Q_DOT[kind.activation](kxy, kxx, kyy)
    return hyper.sigma_b2 + hyper.sigma_w2 * q + np.asarray(kxy) * q_dot


# ---------------------------------------------------------------------------
# pointwise API
# ---------------------------------------------------------------------------

def pre_kernel(x: ArrayLike, y: ArrayLike, hyper: HyperParams) -> float:
    x, y = _as_vector(x), _as_vector(y)
    _check_pair(x, y, hyper)
    return float(hyper.sigma_b2 + (hyper.sigma_w2 / hyper.d0) * np.dot(x, y))


def eval_kernel(kind: KernelKind, x: ArrayLike, y: ArrayLike, hyper: HyperParams) -> float:
    x, y = _as_vector(x), _as_vector(y)
    _check_pair(x, y, hyper)
    if kind is KernelKind.LINEAR:
        return float(np.dot(x, y))
    kxy = pre_kernel(x, y, hyper)
    kxx = pre_kernel(x, x, hyper)
    kyy = pre_kernel(y, y, hyper)
    return float(kernel_from_pre(kind, kxy, kxx, kyy, hyper))


def derivative_kernel(activation: Activation, x: ArrayLike, y: ArrayLike, hyper: HyperParams) -> float:
    x, y = _as_vector(x), _as_vector(y)
    _check_pair(x, y, hyper)
    activation = Activation.from_name(activation) if isinstance(activation, str) else activation
    kxy = pre_kernel(x, y, hyper)
    kxx = pre_kernel(x, x, hyper)
    kyy = pre_kernel(y, y, hyper)
    return float(_Q_DOT[activation](kxy, kxx, kyy))


# ---------------------------------------------------------------------------
# grams
# ---------------------------------------------------------------------------

def mirror_upper(values: np.ndarray) -> np.ndarray:
    """Copy the upper triangle onto the lower one so the result is exactly symmetric."""
    return np.triu(values) + np.triu(values, 1).T


def pre_activation_gram(X: np.ndarray, hyper: HyperParams) -> np.ndarray:
    return mirror_upper(hyper.sigma_b2 + (hyper.sigma_w2 / hyper.d0) * (X.T @ X))


def kernel_matrix(kind: KernelKind, X: np.ndarray, hyper: HyperParams) -> np.ndarray:
    """Gram values of ``kind`` over the columns of ``X`` (d0 x N)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != hyper.d0:
        raise ValidationError(f"Data has dimension {X.shape[0]}, hyper.d0 = {hyper.d0}")
    if kind is KernelKind.LINEAR:
        return mirror_upper(X.T @ X)

    K = pre_activation_gram(X, hyper)
    diag = np.diag(K).copy()
    if kind.activation is Activation.RELU:
        degenerate = np.flatnonzero(diag <= 0)
        if degenerate.size:
            raise DegenerateInputError(
                f"{kind.label} gram: zero-norm input with sigma_b2 = {hyper.sigma_b2}",
                column=int(degenerate[0]),
            )
    values = kernel_from_pre(kind, K, diag[:, None], diag[None, :], hyper)
    return mirror_upper(values)


def assemble_gram(kind: KernelKind, dataset: Dataset, hyper: HyperParams) -> Gram:
    if dataset.n_samples < 1:
        raise ValidationError("Cannot assemble a gram on an empty dataset")
    hyper.validate()
    values = kernel_matrix(kind, dataset.X, hyper)
    logger.debug(f"Assembled {kind.label} gram N={dataset.n_samples} d0={dataset.d0}")
    return Gram(values=values, partition=list(dataset.partition), kind=kind, hyper=hyper)
