import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional


@dataclass
class Nc1Report:
    """Within/between traces and their ratio, optionally relative to the data."""

    tr_within: float
    tr_between: float
    nc1: float
    log10_nc1: float
    tau: float = 1e-8
    nc1_data: Optional[float] = None
    relative_nc1: Optional[float] = None
    tr_total: Optional[float] = None
    tr_between_noncentred: Optional[float] = None

    @classmethod
    def from_traces(cls, tr_within: float, tr_between: float, tau: float = 1e-8) -> "Nc1Report":
        nc1 = tr_within / tr_between
        log10_nc1 = math.log10(nc1) if nc1 > 0 else float("-inf")
        return cls(
            tr_within=float(tr_within),
            tr_between=float(tr_between),
            nc1=float(nc1),
            log10_nc1=float(log10_nc1),
            tau=tau,
        )

    def with_data(self, nc1_data: float) -> "Nc1Report":
        self.nc1_data = float(nc1_data)
        self.relative_nc1 = float(self.nc1 / (nc1_data + self.tau))
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
