import math
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from src.data_collection.matrix_store import write_json
from src.models.config import Config
from src.models.sweep import SweepResult
from src.services.sweep_service import cell_summary, heatmap_frame
from src.utils.exceptions import DataProcessingError, VisualizationError
from src.utils.logger import get_logger
from src.visualization.charts import Visualizer

logger = get_logger(__name__)

RECORD_COLUMNS = [
    "method", "N", "d0", "seed_index", "seed", "partition", "status",
    "tr_within", "tr_between", "nc1", "log10_nc1", "nc1_data", "relative_nc1", "message",
]


def method_slug(label: str) -> str:
    return label.lower().replace(" ", "_")


def _finite_or_none(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ExportService:
    def __init__(self, config: Config, output_dir: Path):
        self.config = config
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"ExportService initialized with output directory: {output_dir}")

    def export_to_csv(self, df: pd.DataFrame, filename: str, index: bool = False) -> Path:
        filepath = self.output_dir / filename
        try:
            df.to_csv(filepath, index=index, float_format="%.17g")
            logger.info(f"Exported CSV: {filepath}")
            return filepath
        except Exception as e:
            error_msg = f"Error exporting CSV: {e}"
            logger.error(error_msg)
            raise DataProcessingError(error_msg, path=str(filepath)) from e

    def records_frame(self, result: SweepResult) -> pd.DataFrame:
        return pd.DataFrame([r.to_row() for r in result.records], columns=RECORD_COLUMNS)

    def summary_payload(self, result: SweepResult, summary: pd.DataFrame) -> Dict[str, Any]:
        sweep = result.config
        timing: Dict[str, float] = {}
        for record in result.records:
            timing[record.method] = timing.get(record.method, 0.0) + record.elapsed_s
        cells: List[Dict[str, Any]] = [
            {key: _finite_or_none(value) for key, value in row.items()}
            for row in summary.to_dict(orient="records")
        ]
        return {
            "profile": sweep.profile,
            "master_seed": sweep.master_seed,
            "n_grid": list(sweep.n_grid),
            "d0_grid": list(sweep.d0_grid),
            "seeds": sweep.seeds,
            "methods": [m.label for m in sweep.methods],
            "records": len(result.records),
            "expected_records": sweep.expected_records,
            "status_counts": result.status_counts(),
            "cells": cells,
            "timing_s": {"total": sum(timing.values()), "per_method": timing},
        }

    def emit_outputs(self, result: SweepResult, formats: Optional[List[str]] = None) -> Dict[str, Path]:
        """records.csv, heatmap CSVs per method, summary.json and optional rendered heatmaps."""
        paths: Dict[str, Path] = {"records": self.export_to_csv(self.records_frame(result), "records.csv")}

        summary = cell_summary(result)
        for method in result.config.methods:
            slug = method_slug(method.label)
            paths[f"heatmap_{slug}"] = self.export_to_csv(
                heatmap_frame(summary, method.label, "mean_log10_nc1"), f"heatmap_{slug}.csv", index=True
            )
            paths[f"heatmap_rel_{slug}"] = self.export_to_csv(
                heatmap_frame(summary, method.label, "mean_log10_relative_nc1"), f"heatmap_rel_{slug}.csv", index=True
            )

        paths["summary"] = write_json(self.summary_payload(result, summary), self.output_dir / "summary.json")

        formats = self.config.visualization.output_format if formats is None else formats
        if formats:
            visualizer = Visualizer(self.config, self.output_dir)
            for method in result.config.methods:
                slug = method_slug(method.label)
                fig = visualizer.create_nc1_heatmap(
                    heatmap_frame(summary, method.label), title=f"{method.label}: mean log10 NC1"
                )
                for fmt in formats:
                    try:
                        paths[f"heatmap_{slug}_{fmt}"] = visualizer.save_figure(fig, f"heatmap_{slug}", fmt)
                    except VisualizationError as e:
                        logger.warning(f"Skipping {fmt} rendering for {method.label}: {e}")

        logger.info(f"Wrote {len(paths)} output files to {self.output_dir}")
        return paths
