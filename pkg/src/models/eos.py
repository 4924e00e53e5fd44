from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.utils.exceptions import ValidationError


@dataclass
class AnnealSchedule:
    """Strictly decreasing effective widths; the last one is the target d1."""

    factors: List[float]

    def __post_init__(self):
        self.factors = [float(f) for f in self.factors]
        if not self.factors:
            raise ValidationError("Annealing schedule must not be empty")
        if any(not f > 0 for f in self.factors):
            raise ValidationError(f"Annealing factors must be positive: {self.factors}")
        if any(b >= a for a, b in zip(self.factors[:-1], self.factors[1:])):
            raise ValidationError(f"Annealing factors must be strictly decreasing: {self.factors}")

    @property
    def target(self) -> float:
        return self.factors[-1]

    def __len__(self) -> int:
        return len(self.factors)


@dataclass
class SolverConfig:
    tolerance: float = 1e-6
    max_newton: int = 50
    gmres_tol: float = 1e-4
    gmres_restart: int = 30
    gmres_maxiter: int = 2
    fd_step: float = 1e-7
    picard_damping: float = 0.5
    max_picard: int = 2000
    max_backtracks: int = 8
    pd_floor: float = 1e-10
    max_pd_repairs: int = 5
    coordinates: str = "C"

    def validate(self) -> None:
        positive = {
            "tolerance": self.tolerance,
            "max_newton": self.max_newton,
            "gmres_tol": self.gmres_tol,
            "gmres_restart": self.gmres_restart,
            "gmres_maxiter": self.gmres_maxiter,
            "fd_step": self.fd_step,
            "max_picard": self.max_picard,
            "pd_floor": self.pd_floor,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ValidationError(f"Solver setting {name} must be positive, got {value}")
        if not 0 < self.picard_damping <= 1:
            raise ValidationError(f"picard_damping must lie in (0, 1], got {self.picard_damping}")
        if self.coordinates != "C":
            raise ValidationError(f"Only C-space coordinates are supported, got {self.coordinates}")


@dataclass
class FactorLog:
    index: int
    factor: float
    residual_history: List[float] = field(default_factory=list)
    newton_iterations: int = 0
    picard_iterations: int = 0
    converged: bool = False
    method: str = "newton"
    pd_repairs: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "factor": self.factor,
            "residual_history": list(self.residual_history),
            "newton_iterations": self.newton_iterations,
            "picard_iterations": self.picard_iterations,
            "converged": self.converged,
            "method": self.method,
            "pd_repairs": self.pd_repairs,
        }


@dataclass
class EosState:
    C: np.ndarray
    K: np.ndarray
    Q: np.ndarray
    f_bar: np.ndarray
    A: np.ndarray
    residual_norm: float
    annealing_factor: float
    log: List[FactorLog] = field(default_factory=list)

    def convergence_log(self, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        payload = {
            "annealing_factor": self.annealing_factor,
            "residual_norm": self.residual_norm,
            "factors": [entry.to_dict() for entry in self.log],
        }
        if extra:
            payload.update(extra)
        return payload
