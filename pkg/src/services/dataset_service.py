from pathlib import Path
from typing import Optional, Sequence, Tuple

from src.data_collection.matrix_store import load_dataset, save_dataset
from src.data_collection.mixture_generator import MixtureGenerator
from src.models.config import Config
from src.models.dataset import Dataset
from src.utils.exceptions import DataProcessingError, KernelNc1Error
from src.utils.logger import get_logger

logger = get_logger(__name__)


class DatasetService:
    def __init__(self, config: Config):
        self.config = config
        self.generator = MixtureGenerator(config)
        logger.info("DatasetService initialized")

    def generate(
        self,
        preset: str,
        n_samples: Optional[int],
        d0: int,
        seed: int,
        class_sizes: Optional[Sequence[int]] = None,
    ) -> Dataset:
        logger.info(f"Generating dataset '{preset}' N={n_samples} d0={d0} seed={seed}")
        try:
            dataset = self.generator.make_preset(preset, n_samples, d0, seed, class_sizes=class_sizes)
        except KernelNc1Error:
            raise
        except Exception as e:
            error_msg = f"Error generating dataset '{preset}': {e}"
            logger.error(error_msg)
            raise DataProcessingError(error_msg) from e
        logger.info(f"Dataset ready: partition={dataset.partition}")
        return dataset

    def save(self, dataset: Dataset, stem: Path) -> Tuple[Path, Path]:
        return save_dataset(dataset, stem)

    def load(self, stem: Path) -> Dataset:
        logger.info(f"Loading dataset from {stem}")
        return load_dataset(stem)
