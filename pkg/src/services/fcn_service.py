from dataclasses import replace
from pathlib import Path
from typing import Dict, Optional, Tuple

import pandas as pd

from src.analysis.fcn import init_fcn, train
from src.data_collection.matrix_store import write_json
from src.models.config import Config
from src.models.dataset import Dataset
from src.models.fcn import FcnArchitecture, FcnModel, TrainConfig, TrainTrace
from src.models.kernel import Activation
from src.utils.exceptions import CalculationError, DataProcessingError, KernelNc1Error
from src.utils.logger import get_logger

logger = get_logger(__name__)


class FcnService:
    def __init__(self, config: Config):
        self.config = config
        logger.info(f"FcnService initialized with presets: {sorted(config.fcn.presets)}")

    def train_config(
        self,
        activation: Activation,
        preset: Optional[str] = None,
        **overrides,
    ) -> TrainConfig:
        """Preset by name (defaults to the activation's), with non-None overrides applied."""
        base = self.config.fcn.preset(preset or activation.value)
        changes = {k: v for k, v in overrides.items() if v is not None}
        cfg = replace(base, **changes)
        cfg.validate()
        return cfg

    def architecture(
        self,
        d0: int,
        activation: Activation,
        depth: Optional[int] = None,
        width: Optional[int] = None,
    ) -> FcnArchitecture:
        return FcnArchitecture.uniform(
            d0=d0,
            depth=int(depth or self.config.fcn.depth),
            width=int(width or self.config.fcn.width),
            activation=activation,
            sigma_w2=self.config.hyper.sigma_w2,
            sigma_b2=self.config.hyper.sigma_b2,
        )

    def run(
        self,
        dataset: Dataset,
        arch: FcnArchitecture,
        cfg: TrainConfig,
    ) -> Tuple[FcnModel, TrainTrace]:
        logger.info(
            f"Training FCN widths={arch.widths} {arch.activation.value} "
            f"lr={cfg.learning_rate} wd={cfg.weight_decay} steps={cfg.steps} seed={cfg.seed}"
        )
        model = init_fcn(arch, cfg.seed)
        try:
            trace = train(model, dataset, cfg, tau=self.config.nc1.tau)
        except KernelNc1Error:
            raise
        except Exception as e:
            error_msg = f"Unexpected error during FCN training: {e}"
            logger.error(error_msg)
            raise CalculationError(error_msg) from e
        logger.info(
            f"Training finished: loss={trace.loss[-1]:.6e} sign accuracy={trace.accuracy[-1]:.4f}"
        )
        return model, trace

    def export(self, trace: TrainTrace, output_dir: Path, extra: Optional[Dict] = None) -> Dict[str, Path]:
        output_dir = Path(output_dir)
        trace_path = output_dir / "fcn_trace.csv"
        try:
            output_dir.mkdir(parents=True, exist_ok=True)
            pd.DataFrame(
                {"step": list(trace.steps()), "loss": trace.loss, "sign_accuracy": trace.accuracy}
            ).to_csv(trace_path, index=False, float_format="%.17g")
        except Exception as e:
            error_msg = f"Error writing training trace: {e}"
            logger.error(error_msg)
            raise DataProcessingError(error_msg, path=str(trace_path)) from e

        payload = {"nc1": trace.final_nc1.to_dict() if trace.final_nc1 else None}
        if extra:
            payload.update(extra)
        report_path = write_json(payload, output_dir / "fcn_nc1.json")
        logger.info(f"FCN outputs written to {output_dir}")
        return {"trace": trace_path, "report": report_path}
