"""
Visualization module.
"""

from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import plotly.graph_objects as go

from src.models.config import Config
from src.models.kernel import Gram
from src.utils.exceptions import VisualizationError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class Visualizer:
    """
    Heatmaps of sweep grids and of kernel grams, rendered with Plotly.

    The images are a convenience; quantitative results live in the CSVs.
    """

    def __init__(self, config: Config, output_dir: Path):
        """
        Initialize visualizer.

        Args:
            config: Configuration object
            output_dir: Output directory for figures
        """
        self.config = config
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.theme = config.visualization.theme
        logger.info(f"Visualizer initialized with output directory: {output_dir}")

    def create_nc1_heatmap(self, grid: pd.DataFrame, title: str, colorbar_title: str = "log10 NC1") -> go.Figure:
        """N x d0 grid (rows N, columns d0) as an annotated heatmap."""
        settings = self.config.visualization
        z = grid.to_numpy(dtype=np.float64)
        fig = go.Figure(data=go.Heatmap(
            z=z,
            x=[str(c) for c in grid.columns],
            y=[str(i) for i in grid.index],
            colorscale=settings.colorscale,
            colorbar={"title": colorbar_title},
            text=z,
            texttemplate="%{text:.2f}",
            textfont={"size": 10},
        ))
        fig.update_layout(
            title=title,
            xaxis_title="d0",
            yaxis_title="N",
            template=self.theme,
            width=settings.width,
            height=settings.height,
        )
        return fig

    def create_gram_heatmap(self, gram: Gram, title: Optional[str] = None) -> go.Figure:
        """Gram matrix with class blocks outlined."""
        settings = self.config.visualization
        fig = go.Figure(data=go.Heatmap(
            z=gram.values,
            colorscale="RdBu",
            zmid=0,
            colorbar={"title": gram.kind.label},
        ))
        for s in gram.class_slices()[1:]:
            edge = s.start - 0.5
            fig.add_hline(y=edge, line_width=1, line_color="black")
            fig.add_vline(x=edge, line_width=1, line_color="black")
        fig.update_layout(
            title=title or f"{gram.kind.label} gram (N={gram.size})",
            template=self.theme,
            width=settings.width,
            height=settings.height,
            yaxis={"autorange": "reversed"},
        )
        return fig

    def save_figure(self, fig: go.Figure, filename: str, format: str = "svg") -> Path:
        """
        Save figure to file.

        Args:
            fig: Plotly figure object
            filename: Output filename (without extension)
            format: Output format (svg, html, png)

        Returns:
            Path to saved file

        Raises:
            VisualizationError: If saving fails
        """
        filepath = self.output_dir / f"{filename}.{format}"

        try:
            if format == "html":
                fig.write_html(str(filepath))
            elif format in ("svg", "png"):
                fig.write_image(str(filepath), format=format)
            else:
                raise VisualizationError(f"Unsupported format: {format}")

            logger.info(f"Saved visualization: {filepath}")
            return filepath
        except Exception as e:
            error_msg = f"Error saving visualization {filename}: {e}"
            logger.error(error_msg)
            raise VisualizationError(error_msg) from e
