"""
Models module - Data models and type definitions.
"""

from src.models.config import Config, Profile
from src.models.dataset import ClassSpec, Dataset, DatasetMeta, MixtureSpec
from src.models.eos import AnnealSchedule, EosState, SolverConfig
from src.models.fcn import FcnArchitecture, FcnModel, TrainConfig, TrainTrace
from src.models.kernel import Activation, Gram, HyperParams, KernelKind
from src.models.report import Nc1Report
from src.models.sweep import MethodSpec, RecordStatus, SweepConfig, SweepRecord, SweepResult

__all__ = [
    "Config",
    "Profile",
    "ClassSpec",
    "Dataset",
    "DatasetMeta",
    "MixtureSpec",
    "AnnealSchedule",
    "EosState",
    "SolverConfig",
    "FcnArchitecture",
    "FcnModel",
    "TrainConfig",
    "TrainTrace",
    "Activation",
    "Gram",
    "HyperParams",
    "KernelKind",
    "Nc1Report",
    "MethodSpec",
    "RecordStatus",
    "SweepConfig",
    "SweepRecord",
    "SweepResult",
]
