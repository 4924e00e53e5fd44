from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

from src.analysis.eos_solver import default_schedule, solve_eos
from src.analysis.nc1 import nc1_relative_report
from src.data_collection.matrix_store import write_json, write_matrix
from src.models.config import Config
from src.models.dataset import Dataset
from src.models.eos import AnnealSchedule, EosState, SolverConfig
from src.models.kernel import Gram, HyperParams, KernelKind
from src.models.report import Nc1Report
from src.utils.exceptions import CalculationError, KernelNc1Error
from src.utils.logger import get_logger

logger = get_logger(__name__)


class EosService:
    def __init__(self, config: Config):
        self.config = config
        logger.info(
            f"EosService initialized (sigma2={config.eos.sigma2}, target d1={config.eos.target_d1})"
        )

    def schedule_for(self, target_d1: Optional[int] = None, factors: Optional[List[float]] = None) -> AnnealSchedule:
        if factors:
            return AnnealSchedule(list(factors))
        if target_d1 is None and self.config.eos.schedule:
            return AnnealSchedule(list(self.config.eos.schedule))
        return default_schedule(int(target_d1 if target_d1 is not None else self.config.eos.target_d1))

    def solve(
        self,
        dataset: Dataset,
        target_d1: Optional[int] = None,
        sigma_a2: Optional[float] = None,
        sigma2: Optional[float] = None,
        schedule: Optional[List[float]] = None,
        tolerance: Optional[float] = None,
    ) -> EosState:
        hyper = self.config.hyper.with_d0(dataset.d0)
        if sigma_a2 is not None:
            hyper = replace(hyper, sigma_a2=float(sigma_a2))
        hyper.validate()
        cfg: SolverConfig = self.config.eos.solver
        if tolerance is not None:
            cfg = replace(cfg, tolerance=float(tolerance))
        sigma2 = float(sigma2 if sigma2 is not None else self.config.eos.sigma2)
        plan = self.schedule_for(target_d1, schedule)

        logger.info(
            f"Solving EoS: N={dataset.n_samples} d0={dataset.d0} "
            f"schedule {int(plan.factors[0])} -> {int(plan.target)} ({len(plan)} factors)"
        )
        try:
            state = solve_eos(dataset, hyper, sigma2, plan, cfg)
        except KernelNc1Error:
            raise
        except Exception as e:
            error_msg = f"Unexpected error solving EoS: {e}"
            logger.error(error_msg)
            raise CalculationError(error_msg) from e
        logger.info(f"EoS converged at d1={state.annealing_factor:g}, |F|={state.residual_norm:.3e}")
        return state

    def gram_of(self, state: EosState, dataset: Dataset, hyper: Optional[HyperParams] = None) -> Gram:
        """The adapted post-activation kernel as a gram (Erf family, scaled by sigma_a^2)."""
        hyper = (hyper or self.config.hyper).with_d0(dataset.d0)
        return Gram(values=state.Q, partition=list(dataset.partition), kind=KernelKind.NNGP_ERF, hyper=hyper)

    def nc1(self, state: EosState, dataset: Dataset) -> Nc1Report:
        settings = self.config.nc1
        return nc1_relative_report(
            self.gram_of(state, dataset), dataset, tau=settings.tau, floor=settings.degeneracy_floor
        )

    def export(self, state: EosState, output_dir: Path, extra: Optional[Dict] = None) -> Dict[str, Path]:
        output_dir = Path(output_dir)
        paths = {
            "C": write_matrix(state.C, output_dir / "eos_C.csv", prefix="c"),
            "Q": write_matrix(state.Q, output_dir / "eos_Q.csv", prefix="q"),
            "log": write_json(state.convergence_log(extra), output_dir / "eos_convergence.json"),
        }
        logger.info(f"EoS outputs written to {output_dir}")
        return paths
