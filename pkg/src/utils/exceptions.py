"""
Custom exceptions for the project.
"""

from typing import List, Optional


class KernelNc1Error(Exception):
    """Base exception for the kernel NC1 toolkit."""
    pass


class ConfigurationError(KernelNc1Error):
    """Configuration-related errors."""
    pass


class ValidationError(KernelNc1Error):
    """Validation errors."""
    pass


class DataProcessingError(KernelNc1Error):
    """Dataset and result I/O errors."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message if path is None else f"{message} [{path}]")
        self.path = path


class CalculationError(KernelNc1Error):
    """Calculation errors."""
    pass


class DegenerateInputError(CalculationError):
    """Zero-norm input where a ReLU angle is undefined."""

    def __init__(self, message: str, column: Optional[int] = None):
        super().__init__(message if column is None else f"{message} (column {column})")
        self.column = column


class DegenerateBetweenVariance(CalculationError):
    """Between-class trace at or below the degeneracy floor."""
    pass


class ConvergenceError(KernelNc1Error):
    """Iterative solver or training run failed to converge."""

    def __init__(
        self,
        message: str,
        factor_index: Optional[int] = None,
        residual_history: Optional[List[float]] = None,
    ):
        super().__init__(message)
        self.factor_index = factor_index
        self.residual_history = list(residual_history or [])


class VisualizationError(KernelNc1Error):
    """Visualization errors."""
    pass
