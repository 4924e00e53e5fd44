from pathlib import Path
from typing import Optional, Tuple

from src.analysis.kernels import assemble_gram
from src.analysis.nc1 import nc1_of_gram, nc1_relative_report
from src.data_collection.matrix_store import load_gram, save_gram
from src.models.config import Config
from src.models.dataset import Dataset
from src.models.kernel import Gram, HyperParams, KernelKind
from src.models.report import Nc1Report
from src.utils.exceptions import CalculationError, KernelNc1Error
from src.utils.logger import get_logger

logger = get_logger(__name__)


class KernelService:
    def __init__(self, config: Config):
        self.config = config
        logger.info("KernelService initialized")

    def hyper_for(self, dataset: Dataset, hyper: Optional[HyperParams] = None) -> HyperParams:
        return (hyper or self.config.hyper).with_d0(dataset.d0)

    def build_gram(self, kind: KernelKind, dataset: Dataset, hyper: Optional[HyperParams] = None) -> Gram:
        hyper = self.hyper_for(dataset, hyper)
        logger.info(f"Assembling {kind.label} gram on N={dataset.n_samples}, d0={dataset.d0}")
        try:
            return assemble_gram(kind, dataset, hyper)
        except KernelNc1Error:
            raise
        except Exception as e:
            error_msg = f"Error assembling {kind.label} gram: {e}"
            logger.error(error_msg)
            raise CalculationError(error_msg) from e

    def nc1(self, gram: Gram, dataset: Optional[Dataset] = None) -> Nc1Report:
        """Gram NC1; relative to the data when the dataset is given."""
        settings = self.config.nc1
        if dataset is None:
            report = nc1_of_gram(gram, tau=settings.tau, floor=settings.degeneracy_floor)
        else:
            report = nc1_relative_report(gram, dataset, tau=settings.tau, floor=settings.degeneracy_floor)
        logger.info(f"{gram.kind.label}: NC1={report.nc1:.6g} (log10 {report.log10_nc1:.4f})")
        return report

    def save(self, gram: Gram, stem: Path) -> Tuple[Path, Path]:
        return save_gram(gram, stem)

    def load(self, stem: Path) -> Gram:
        logger.info(f"Loading gram from {stem}")
        return load_gram(stem)
