from src.services.dataset_service import DatasetService
from src.services.kernel_service import KernelService
from src.services.eos_service import EosService
from src.services.fcn_service import FcnService
from src.services.sweep_service import SweepService
from src.services.export_service import ExportService
from src.services.verification_service import VerificationService

__all__ = [
    "DatasetService",
    "KernelService",
    "EosService",
    "FcnService",
    "SweepService",
    "ExportService",
    "VerificationService",
]
