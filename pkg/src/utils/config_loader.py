import yaml
from pathlib import Path
from typing import Any, Dict, Optional

from src.models.config import Config
from src.models.sweep import MethodSpec, SweepConfig
from src.utils.exceptions import ConfigurationError, KernelNc1Error
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent / "config" / "config.yaml"


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        error_msg = f"Configuration file not found: {path}"
        logger.error(error_msg)
        raise ConfigurationError(error_msg) from None
    except yaml.YAMLError as e:
        error_msg = f"Error parsing YAML configuration: {e}"
        logger.error(error_msg)
        raise ConfigurationError(error_msg) from e

    if not data:
        raise ConfigurationError(f"Configuration file is empty: {path}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration root must be a mapping: {path}")
    return data


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[Path] = None) -> Config:
    """
    Load the toolkit configuration.

    A user file is layered over ``config/config.yaml``: omitted fields keep
    their defaults, mappings merge key by key, lists are replaced.
    """
    logger.info(f"Loading configuration from {config_path or DEFAULT_CONFIG_PATH}")
    data = _read_yaml(DEFAULT_CONFIG_PATH)
    if config_path is not None and Path(config_path).resolve() != DEFAULT_CONFIG_PATH.resolve():
        data = _merge(data, _read_yaml(Path(config_path)))

    try:
        config = Config.from_dict(data)
        config.hyper.validate()
        config.eos.solver.validate()
    except KernelNc1Error as e:
        error_msg = f"Invalid configuration: {e}"
        logger.error(error_msg)
        raise ConfigurationError(error_msg) from e
    except Exception as e:
        error_msg = f"Unexpected error loading configuration: {e}"
        logger.error(error_msg)
        raise ConfigurationError(error_msg) from e

    logger.info("Configuration loaded successfully")
    return config


def build_sweep_config(
    config: Config,
    output_dir: Path,
    master_seed: int = 0,
    workers: Optional[int] = None,
) -> SweepConfig:
    defaults = config.sweep
    try:
        sweep = SweepConfig(
            profile=defaults.profile,
            n_grid=[int(n) for n in defaults.n_grid],
            d0_grid=[int(d) for d in defaults.d0_grid],
            seeds=int(defaults.seeds),
            methods=[MethodSpec.parse(entry) for entry in defaults.methods],
            hyper=config.hyper,
            output_dir=Path(output_dir),
            master_seed=int(master_seed),
            workers=int(workers if workers is not None else defaults.workers),
            eos_sigma2=config.eos.sigma2,
        )
        config.profile(sweep.profile)
        sweep.validate()
    except KernelNc1Error as e:
        error_msg = f"Invalid sweep configuration: {e}"
        logger.error(error_msg)
        raise ConfigurationError(error_msg) from e
    return sweep
