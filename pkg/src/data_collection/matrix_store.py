"""
CSV + JSON persistence for datasets and gram matrices.

A dataset is a pair ``<stem>.csv`` (d0 rows, one column per sample) and
``<stem>.json`` (partition, labels, meta, seed). A gram is ``<stem>.csv``
(full N x N matrix) with a ``<stem>.json`` sidecar (kind, hyper, partition).
"""

import json
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd

from src.models.dataset import Dataset, DatasetMeta
from src.models.kernel import Gram, HyperParams, KernelKind
from src.utils.exceptions import DataProcessingError, KernelNc1Error
from src.utils.logger import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"


def _paths(stem: Path) -> Tuple[Path, Path]:
    stem = Path(stem)
    if stem.suffix in (".csv", ".json"):
        stem = stem.with_suffix("")
    return stem.with_suffix(".csv"), stem.with_suffix(".json")


def write_matrix(matrix: np.ndarray, path: Path, prefix: str = "c") -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(
            np.asarray(matrix, dtype=np.float64),
            columns=[f"{prefix}{j}" for j in range(matrix.shape[1])],
        )
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except Exception as e:
        error_msg = f"Error writing matrix CSV: {e}"
        logger.error(error_msg)
        raise DataProcessingError(error_msg, path=str(path)) from e
    return path


def read_matrix(path: Path) -> np.ndarray:
    try:
        return pd.read_csv(path, float_precision="round_trip").to_numpy(dtype=np.float64)
    except Exception as e:
        error_msg = f"Error reading matrix CSV: {e}"
        logger.error(error_msg)
        raise DataProcessingError(error_msg, path=str(path)) from e


def write_json(payload: Dict[str, Any], path: Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    except Exception as e:
        error_msg = f"Error writing JSON: {e}"
        logger.error(error_msg)
        raise DataProcessingError(error_msg, path=str(path)) from e
    return path


def read_json(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except Exception as e:
        error_msg = f"Error reading JSON: {e}"
        logger.error(error_msg)
        raise DataProcessingError(error_msg, path=str(path)) from e


def save_dataset(dataset: Dataset, stem: Path) -> Tuple[Path, Path]:
    matrix_path, header_path = _paths(stem)
    write_matrix(dataset.X, matrix_path, prefix="x")
    write_json(dataset.header(), header_path)
    logger.info(f"Saved dataset N={dataset.n_samples} d0={dataset.d0} to {matrix_path}")
    return matrix_path, header_path


def load_dataset(stem: Path) -> Dataset:
    matrix_path, header_path = _paths(stem)
    header = read_json(header_path)
    X = read_matrix(matrix_path)
    try:
        partition = [int(n) for n in header["partition"]]
        labels = np.repeat(np.asarray(header["labels"], dtype=np.float64), partition)
        meta = header.get("meta", {})
        return Dataset(
            X=X,
            labels=labels,
            partition=partition,
            meta=DatasetMeta(
                means=list(meta.get("means", [])),
                stds=list(meta.get("stds", [])),
                seed=int(header.get("seed", meta.get("seed", 0))),
                preset=meta.get("preset"),
            ),
        )
    except (KeyError, KernelNc1Error) as e:
        raise DataProcessingError(f"Malformed dataset header: {e}", path=str(header_path)) from e


def save_gram(gram: Gram, stem: Path) -> Tuple[Path, Path]:
    matrix_path, header_path = _paths(stem)
    write_matrix(gram.values, matrix_path, prefix="q")
    write_json(
        {"kind": gram.kind.value, "hyper": gram.hyper.to_dict(), "partition": list(gram.partition)},
        header_path,
    )
    logger.info(f"Saved {gram.kind.label} gram ({gram.size}x{gram.size}) to {matrix_path}")
    return matrix_path, header_path


def load_gram(stem: Path) -> Gram:
    matrix_path, header_path = _paths(stem)
    header = read_json(header_path)
    try:
        return Gram(
            values=read_matrix(matrix_path),
            partition=header["partition"],
            kind=KernelKind.from_name(header["kind"]),
            hyper=HyperParams(**header["hyper"]),
        )
    except (KeyError, KernelNc1Error) as e:
        raise DataProcessingError(f"Malformed gram sidecar: {e}", path=str(header_path)) from e
