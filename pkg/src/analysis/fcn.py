"""
Finite-width fully connected baseline trained by full-batch gradient descent.

Samples are columns: the input is d0 x N, hidden activations are d_l x N and
the prediction is 1 x N. Gradients are written out by hand.
"""

from typing import List, Tuple

import numpy as np
from scipy.special import erf

from src.analysis.nc1 import features_relative_report
from src.models.dataset import Dataset
from src.models.fcn import FcnArchitecture, FcnModel, TrainConfig, TrainTrace
from src.models.kernel import Activation
from src.utils.exceptions import CalculationError, ConvergenceError, ValidationError
from src.utils.logger import get_logger
from src.utils.rng import standard_normal, stream

logger = get_logger(__name__)

_ERF_SLOPE = 2.0 / np.sqrt(np.pi)


def activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation is Activation.ERF:
        return erf(z)
    return np.maximum(z, 0.0)


def activate_derivative(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation is Activation.ERF:
        return _ERF_SLOPE * np.exp(-z * z)
    return (z > 0).astype(np.float64)


def init_fcn(arch: FcnArchitecture, seed: int) -> FcnModel:
    """W_l ~ N(0, sigma_w^2 / d_{l-1}) and b_l ~ N(0, sigma_b^2), one stream per layer."""
    weights: List[np.ndarray] = []
    biases: List[np.ndarray] = []
    for layer, (fan_in, fan_out) in enumerate(zip(arch.widths[:-1], arch.widths[1:])):
        generator = stream(seed, layer)
        weights.append(np.sqrt(arch.sigma_w2 / fan_in) * standard_normal(generator, (fan_out, fan_in)))
        if arch.sigma_b2 > 0:
            biases.append(np.sqrt(arch.sigma_b2) * standard_normal(generator, (fan_out,)))
        else:
            biases.append(np.zeros(fan_out))
    return FcnModel(weights=weights, biases=biases, activation=arch.activation)


def _check_input(model: FcnModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != model.widths[0]:
        raise ValidationError(f"Input must have {model.widths[0]} rows, got shape {X.shape}")
    return X


def _forward_cache(model: FcnModel, X: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Pre-activations z_1..z_L and post-activations h_0..h_{L-1}."""
    h = X
    hs = [X]
    zs = []
    for layer, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = W @ h + b[:, None]
        zs.append(z)
        if layer < model.depth - 1:
            h = activate(z, model.activation)
            hs.append(h)
    return zs, hs


def forward(model: FcnModel, X: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    """Hidden post-activations (layers 1..L-1) and the 1 x N predictions."""
    X = _check_input(model, X)
    zs, hs = _forward_cache(model, X)
    return hs[1:], zs[-1]


def loss_and_grad(model: FcnModel, X: np.ndarray, Y: np.ndarray, weight_decay: float) -> Tuple[float, List[np.ndarray]]:
    """
    Mean squared error plus the ridge penalty on every weight and bias.

    Gradients come back in ``model.parameters()`` order.
    """
    X = _check_input(model, X)
    Y = np.asarray(Y, dtype=np.float64).reshape(1, -1)
    n = X.shape[1]
    if Y.shape[1] != n:
        raise ValidationError(f"Got {Y.shape[1]} targets for {n} samples")

    zs, hs = _forward_cache(model, X)
    error = zs[-1] - Y
    penalty = sum(float(np.sum(p * p)) for p in model.parameters())
    loss = float(np.sum(error * error)) / n + weight_decay * penalty

    grads_w: List[np.ndarray] = [None] * model.depth
    grads_b: List[np.ndarray] = [None] * model.depth
    delta = 2.0 * error / n
    for layer in range(model.depth - 1, -1, -1):
        grads_w[layer] = delta @ hs[layer].T + 2.0 * weight_decay * model.weights[layer]
        grads_b[layer] = delta.sum(axis=1) + 2.0 * weight_decay * model.biases[layer]
        if layer > 0:
            delta = (model.weights[layer].T @ delta) * activate_derivative(zs[layer - 1], model.activation)

    return loss, [g for pair in zip(grads_w, grads_b) for g in pair]


def sign_accuracy(predictions: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(np.sign(np.ravel(predictions)) == np.sign(np.ravel(labels))))


def penultimate_features(model: FcnModel, X: np.ndarray) -> np.ndarray:
    """Last hidden layer, sample-major (N x d_{L-1})."""
    hidden, _ = forward(model, X)
    return hidden[-1].T


def train(model: FcnModel, dataset: Dataset, cfg: TrainConfig, tau: float = 1e-8) -> TrainTrace:
    """Full-batch gradient descent in place; one parameter update per step."""
    cfg.validate()
    X, Y = dataset.X, dataset.labels
    trace = TrainTrace()
    params = model.parameters()
    initial_loss = None

    for step in range(1, cfg.steps + 1):
        loss, grads = loss_and_grad(model, X, Y, cfg.weight_decay)
        if initial_loss is None:
            initial_loss = loss
        if not np.isfinite(loss) or loss > cfg.divergence_factor * max(initial_loss, 1e-300):
            raise ConvergenceError(
                f"Training diverged at step {step}: loss {loss:.3e} vs initial {initial_loss:.3e}",
                residual_history=trace.loss,
            )
        _, predictions = forward(model, X)
        trace.append(loss, sign_accuracy(predictions, Y))
        for param, grad in zip(params, grads):
            param -= cfg.learning_rate * grad
        if cfg.log_every and step % cfg.log_every == 0:
            logger.debug(f"step {step}/{cfg.steps}: loss={loss:.6e} acc={trace.accuracy[-1]:.4f}")

    try:
        trace.final_nc1 = features_relative_report(penultimate_features(model, X), dataset, tau=tau)
    except CalculationError as e:
        logger.warning(f"Penultimate-feature NC1 unavailable: {e}")
    return trace
