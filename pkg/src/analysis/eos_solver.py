"""
Equations of State for a data-aware two-layer Erf network.

The unknown is the covariance C of a first-layer weight row. Given C, the
pre-activation matrix K = X^T C X, the post-activation kernel Q, the ridge
predictions f_bar and the auxiliary matrix A follow in closed form, and C must
satisfy

    C^{-1} = (d0 / sigma_w^2) I + (1 / d1) dtr(A Q)/dC.

The solver works in C coordinates on the upper triangle of C, with a
Jacobian-free Newton-Krylov outer loop (GMRES on finite-difference directional
derivatives), backtracking on the max-norm of the residual and a damped
fixed-point fallback. Widths are annealed from 1e5 down to the target d1.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator, gmres

from src.models.dataset import Dataset
from src.models.eos import AnnealSchedule, EosState, FactorLog, SolverConfig
from src.models.kernel import HyperParams
from src.utils.exceptions import CalculationError, ConvergenceError, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

ARCSIN_MARGIN = 1e-12
MIN_TARGET_D1 = 500
MAX_TARGET_D1 = 100_000


@dataclass
class EosEvaluation:
    """Everything derived from one value of C."""

    K: np.ndarray
    Q: np.ndarray
    u: np.ndarray
    D: np.ndarray
    f_bar: np.ndarray
    A: np.ndarray


def initial_covariance(hyper: HyperParams) -> np.ndarray:
    """Infinite-width root (sigma_w^2 / d0) I."""
    return np.eye(hyper.d0) * (hyper.sigma_w2 / hyper.d0)


def _symmetric(C: np.ndarray, d0: int) -> np.ndarray:
    C = np.asarray(C, dtype=np.float64)
    if C.shape != (d0, d0):
        raise ValidationError(f"C must be {d0}x{d0}, got shape {C.shape}")
    if not np.allclose(C, C.T, rtol=1e-12, atol=1e-15):
        raise ValidationError("C must be symmetric")
    return 0.5 * (C + C.T)


def _require_pd(C: np.ndarray) -> None:
    try:
        linalg.cholesky(C, lower=True)
    except linalg.LinAlgError as e:
        raise CalculationError("C is not positive definite (Cholesky failed)") from e


def _evaluate(C: np.ndarray, X: np.ndarray, y: np.ndarray, sigma_a2: float, sigma2: float) -> EosEvaluation:
    K = X.T @ C @ X
    K = np.triu(K) + np.triu(K, 1).T
    D = 1.0 + 2.0 * np.diag(K)
    if np.any(D <= 0):
        raise CalculationError("Pre-activation variance fell below -1/2; C is far from positive definite")
    sqrt_d = np.sqrt(D)
    u = 2.0 * K / np.outer(sqrt_d, sqrt_d)
    if np.any(np.abs(u) > 1.0 + ARCSIN_MARGIN):
        raise CalculationError("Normalized pre-activation correlation outside [-1, 1]")
    u = np.clip(u, -1.0, 1.0)
    Q = sigma_a2 * (2.0 / np.pi) * np.arcsin(u)

    n = Q.shape[0]
    try:
        factor = linalg.cho_factor(Q + sigma2 * np.eye(n), lower=True)
        alpha = linalg.cho_solve(factor, y)
        resolvent = linalg.cho_solve(factor, np.eye(n))
    except (linalg.LinAlgError, ValueError) as e:
        raise CalculationError(f"Linear solve with Q + sigma2 I broke down: {e}") from e

    # y - f_bar = sigma2 * alpha
    f_bar = y - sigma2 * alpha
    A = resolvent - np.outer(alpha, alpha)
    A = 0.5 * (A + A.T)
    return EosEvaluation(K=K, Q=Q, u=u, D=D, f_bar=f_bar, A=A)


def _arcsin_slope(u: np.ndarray, sigma_a2: float) -> np.ndarray:
    if np.any(np.abs(u) >= 1.0 - ARCSIN_MARGIN):
        raise CalculationError("Correlation too close to +-1; arcsin derivative is near-singular")
    return sigma_a2 * (2.0 / np.pi) / np.sqrt(1.0 - u * u)


def _contraction(X: np.ndarray, evaluation: EosEvaluation, sigma_a2: float) -> np.ndarray:
    """
    d tr(A Q) / dC_ij for symmetric C, A held fixed.

    An off-diagonal index moves C_ij and C_ji together, so off-diagonal
    entries carry twice the elementwise gradient.
    """
    u, D = evaluation.u, evaluation.D
    G = evaluation.A * _arcsin_slope(u, sigma_a2)
    sqrt_d = np.sqrt(D)
    W = 2.0 * G / np.outer(sqrt_d, sqrt_d)
    r = 2.0 * np.sum(G * u, axis=1) / D
    grad = X @ (W - np.diag(r)) @ X.T
    grad = 0.5 * (grad + grad.T)
    return 2.0 * grad - np.diag(np.diag(grad))


def _labels(dataset: Dataset) -> np.ndarray:
    return np.asarray(dataset.labels, dtype=np.float64)


def eos_q_and_predictions(
    C: np.ndarray,
    dataset: Dataset,
    hyper: HyperParams,
    sigma2: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    if not sigma2 > 0:
        raise ValidationError(f"sigma2 must be > 0, got {sigma2}")
    C = _symmetric(C, dataset.d0)
    _require_pd(C)
    ev = _evaluate(C, dataset.X, _labels(dataset), hyper.sigma_a2, sigma2)
    return ev.K, ev.Q, ev.f_bar, ev.A


def q_derivative_wrt_c(C: np.ndarray, dataset: Dataset, hyper: HyperParams, i: int, j: int) -> np.ndarray:
    """
    dQ/dC_ij for symmetric C: an off-diagonal index moves C_ij and C_ji together.
    """
    d0 = dataset.d0
    if not (0 <= i < d0 and 0 <= j < d0):
        raise ValidationError(f"Index ({i}, {j}) outside a {d0}x{d0} covariance")
    i, j = min(i, j), max(i, j)
    C = _symmetric(C, d0)
    X = dataset.X

    K = X.T @ C @ X
    K = np.triu(K) + np.triu(K, 1).T
    D = 1.0 + 2.0 * np.diag(K)
    sqrt_d = np.sqrt(D)
    u = np.clip(2.0 * K / np.outer(sqrt_d, sqrt_d), -1.0, 1.0)
    slope = _arcsin_slope(u, hyper.sigma_a2)

    xi, xj = X[i], X[j]
    dK = np.outer(xi, xj)
    if i != j:
        dK = dK + dK.T
    d_diag = np.diag(dK)
    du = 2.0 * dK / np.outer(sqrt_d, sqrt_d) - u * (d_diag[:, None] / D[:, None] + d_diag[None, :] / D[None, :])
    return slope * du


def q_gradient_contraction(C: np.ndarray, dataset: Dataset, hyper: HyperParams, sigma2: float) -> np.ndarray:
    """d0 x d0 matrix of d tr(A Q) / dC_ij with A frozen at its value for C."""
    C = _symmetric(C, dataset.d0)
    ev = _evaluate(C, dataset.X, _labels(dataset), hyper.sigma_a2, sigma2)
    return _contraction(dataset.X, ev, hyper.sigma_a2)


def _bracket_inverse(grad: np.ndarray, hyper: HyperParams, d1_effective: float) -> np.ndarray:
    d0 = grad.shape[0]
    bracket = (d0 / hyper.sigma_w2) * np.eye(d0) + grad / d1_effective
    bracket = 0.5 * (bracket + bracket.T)
    try:
        inverse = linalg.inv(bracket)
    except (linalg.LinAlgError, ValueError) as e:
        raise CalculationError(f"EoS bracket matrix is not invertible: {e}") from e
    if not np.all(np.isfinite(inverse)):
        raise CalculationError("EoS bracket inverse is not finite")
    return 0.5 * (inverse + inverse.T)


def eos_residual(
    C: np.ndarray,
    dataset: Dataset,
    hyper: HyperParams,
    sigma2: float,
    d1_effective: float,
) -> np.ndarray:
    if not d1_effective > 0:
        raise ValidationError(f"Effective width must be > 0, got {d1_effective}")
    C = _symmetric(C, dataset.d0)
    grad = q_gradient_contraction(C, dataset, hyper, sigma2)
    return C - _bracket_inverse(grad, hyper, d1_effective)


def default_schedule(target_d1: int) -> AnnealSchedule:
    """Step-wise widths 1e5 ... 2e4, 1e4 ... 2e3, 1e3 ... target."""
    if not MIN_TARGET_D1 <= target_d1 <= MAX_TARGET_D1:
        raise ValidationError(
            f"Target d1 must lie in [{MIN_TARGET_D1}, {MAX_TARGET_D1}], got {target_d1}"
        )
    factors = (
        list(range(100_000, 19_999, -10_000))
        + list(range(10_000, 1_999, -1_000))
        + list(range(1_000, 499, -100))
    )
    kept = [f for f in factors if f >= target_d1]
    if kept[-1] != target_d1:
        kept.append(target_d1)
    return AnnealSchedule([float(f) for f in kept])


class EosSolver:
    """Annealed Newton-Krylov solver for one dataset."""

    def __init__(self, dataset: Dataset, hyper: HyperParams, sigma2: float, cfg: Optional[SolverConfig] = None):
        if not sigma2 > 0:
            raise ValidationError(f"sigma2 must be > 0, got {sigma2}")
        if hyper.d0 != dataset.d0:
            raise ValidationError(f"hyper.d0 = {hyper.d0} but dataset has d0 = {dataset.d0}")
        self.dataset = dataset
        self.hyper = hyper
        self.sigma2 = float(sigma2)
        self.cfg = cfg or SolverConfig()
        self.cfg.validate()

        self._X = dataset.X
        self._y = _labels(dataset)
        self._upper = np.triu_indices(dataset.d0)
        logger.debug(
            f"EosSolver initialized: N={dataset.n_samples} d0={dataset.d0} "
            f"sigma2={self.sigma2} sigma_a2={hyper.sigma_a2}"
        )

    # -- coordinates ------------------------------------------------------

    def pack(self, C: np.ndarray) -> np.ndarray:
        return C[self._upper].copy()

    def unpack(self, vector: np.ndarray) -> np.ndarray:
        d0 = self.dataset.d0
        C = np.zeros((d0, d0))
        C[self._upper] = vector
        return C + np.triu(C, 1).T

    # -- residual ---------------------------------------------------------

    def _bracket_inverse_at(self, C: np.ndarray, d1: float) -> np.ndarray:
        ev = _evaluate(C, self._X, self._y, self.hyper.sigma_a2, self.sigma2)
        return _bracket_inverse(_contraction(self._X, ev, self.hyper.sigma_a2), self.hyper, d1)

    def residual_vector(self, vector: np.ndarray, d1: float) -> np.ndarray:
        C = self.unpack(vector)
        return (C - self._bracket_inverse_at(C, d1))[self._upper]

    def floor_eigenvalues(self, C: np.ndarray) -> Tuple[np.ndarray, bool]:
        """Lift eigenvalues of C to at least pd_floor * tr(C) / d0."""
        values, vectors = linalg.eigh(C)
        floor = self.cfg.pd_floor * max(float(np.trace(C)), 0.0) / C.shape[0]
        floor = max(floor, self.cfg.pd_floor * self.hyper.sigma_w2 / C.shape[0])
        if values.min() >= floor:
            return C, False
        lifted = (vectors * np.maximum(values, floor)) @ vectors.T
        return 0.5 * (lifted + lifted.T), True

    # -- per-factor solve --------------------------------------------------

    def _jacobian(self, x: np.ndarray, fx: np.ndarray, d1: float) -> LinearOperator:
        x_norm = float(np.linalg.norm(x))

        def matvec(v: np.ndarray) -> np.ndarray:
            v = np.asarray(v, dtype=np.float64).ravel()
            v_norm = float(np.linalg.norm(v))
            if v_norm == 0.0:
                return np.zeros_like(v)
            h = self.cfg.fd_step * (1.0 + x_norm) / v_norm
            return (self.residual_vector(x + h * v, d1) - fx) / h

        return LinearOperator((x.size, x.size), matvec=matvec, dtype=np.float64)

    def _project(self, vector: np.ndarray, log: FactorLog) -> np.ndarray:
        C, repaired = self.floor_eigenvalues(self.unpack(vector))
        if repaired:
            log.pd_repairs += 1
            logger.warning(f"Factor {log.index} (d1={log.factor:g}): eigenvalue floor applied to C")
            if log.pd_repairs > self.cfg.max_pd_repairs:
                raise ConvergenceError(
                    f"C lost positive definiteness {log.pd_repairs} times at d1={log.factor:g}",
                    factor_index=log.index,
                    residual_history=log.residual_history,
                )
        return self.pack(C)

    def _newton(self, x: np.ndarray, d1: float, log: FactorLog) -> Tuple[np.ndarray, bool]:
        cfg = self.cfg
        fx = self.residual_vector(x, d1)
        norm = float(np.max(np.abs(fx)))
        log.residual_history.append(norm)

        while norm >= cfg.tolerance and log.newton_iterations < cfg.max_newton:
            jacobian = self._jacobian(x, fx, d1)
            step, info = gmres(
                jacobian,
                -fx,
                rtol=cfg.gmres_tol,
                restart=min(cfg.gmres_restart, x.size),
                maxiter=cfg.gmres_maxiter,
            )
            if info < 0:
                raise CalculationError(f"GMRES breakdown at d1={d1:g} (info={info})")

            accepted = False
            length = 1.0
            for _ in range(cfg.max_backtracks + 1):
                trial = self._project(x + length * step, log)
                f_trial = self.residual_vector(trial, d1)
                trial_norm = float(np.max(np.abs(f_trial)))
                if np.isfinite(trial_norm) and trial_norm < (1.0 - 1e-4 * length) * norm:
                    accepted = True
                    break
                length *= 0.5

            log.newton_iterations += 1
            if not accepted:
                logger.debug(f"d1={d1:g}: Newton stagnated at |F|={norm:.3e}")
                return x, False

            x, fx, norm = trial, f_trial, trial_norm
            log.residual_history.append(norm)
            logger.debug(
                f"d1={d1:g} newton {log.newton_iterations}: |F|={norm:.3e} step={length:g} gmres_info={info}"
            )

        return x, norm < cfg.tolerance

    def _picard(self, x: np.ndarray, d1: float, log: FactorLog) -> Tuple[np.ndarray, bool]:
        cfg = self.cfg
        alpha = cfg.picard_damping
        C = self.unpack(x)
        for _ in range(cfg.max_picard):
            target = self._bracket_inverse_at(C, d1)
            norm = float(np.max(np.abs(C - target)))
            if norm < cfg.tolerance:
                return self.pack(C), True
            C = self.unpack(self._project(self.pack((1.0 - alpha) * C + alpha * target), log))
            log.picard_iterations += 1
            log.residual_history.append(norm)
        final = float(np.max(np.abs(C - self._bracket_inverse_at(C, d1))))
        log.residual_history.append(final)
        return self.pack(C), final < cfg.tolerance

    def solve_factor(self, index: int, d1: float, C0: np.ndarray) -> Tuple[np.ndarray, FactorLog]:
        """Solve at one effective width starting from ``C0``."""
        log = FactorLog(index=index, factor=float(d1))
        x = self._project(self.pack(_symmetric(C0, self.dataset.d0)), log)

        x, converged = self._newton(x, d1, log)
        if not converged:
            logger.warning(
                f"Factor {index} (d1={d1:g}): Newton did not converge after "
                f"{log.newton_iterations} iterations, switching to damped fixed point"
            )
            log.method = "picard"
            x, converged = self._picard(x, d1, log)

        if not converged:
            raise ConvergenceError(
                f"EoS did not converge at factor {index} (d1={d1:g}); "
                f"last residual {log.residual_history[-1]:.3e}",
                factor_index=index,
                residual_history=log.residual_history,
            )
        log.converged = True
        return self.unpack(x), log

    def solve(self, schedule: AnnealSchedule, initial: Optional[np.ndarray] = None) -> EosState:
        C = initial_covariance(self.hyper) if initial is None else np.asarray(initial, dtype=np.float64)
        logs: List[FactorLog] = []
        for index, d1 in enumerate(schedule.factors):
            C, log = self.solve_factor(index, d1, C)
            logs.append(log)
            logger.debug(
                f"Factor {index} d1={d1:g} converged ({log.method}, "
                f"{log.newton_iterations} newton, {log.picard_iterations} picard) |F|={log.residual_history[-1]:.3e}"
            )

        ev = _evaluate(C, self._X, self._y, self.hyper.sigma_a2, self.sigma2)
        residual = C - _bracket_inverse(_contraction(self._X, ev, self.hyper.sigma_a2), self.hyper, schedule.target)
        return EosState(
            C=C,
            K=ev.K,
            Q=ev.Q,
            f_bar=ev.f_bar,
            A=ev.A,
            residual_norm=float(np.max(np.abs(residual))),
            annealing_factor=schedule.target,
            log=logs,
        )


def solve_eos(
    dataset: Dataset,
    hyper: HyperParams,
    sigma2: float,
    schedule: AnnealSchedule,
    cfg: Optional[SolverConfig] = None,
    initial: Optional[np.ndarray] = None,
) -> EosState:
    return EosSolver(dataset, hyper, sigma2, cfg).solve(schedule, initial=initial)


def central_difference(
    func: Callable[[np.ndarray], np.ndarray],
    C: np.ndarray,
    i: int,
    j: int,
    step: float,
) -> np.ndarray:
    """Symmetric central difference of ``func`` along C_ij (and C_ji)."""
    E = np.zeros_like(C)
    E[i, j] = 1.0
    E[j, i] = 1.0
    return (func(C + step * E) - func(C - step * E)) / (2.0 * step)
