from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from src.utils.exceptions import ValidationError


class DenominatorVariant(str, Enum):
    AS_PRINTED = "as-printed"
    APPENDIX_D = "appendix-D"

    @classmethod
    def from_name(cls, name: str) -> "DenominatorVariant":
        if isinstance(name, cls):
            return name
        for variant in cls:
            if variant.value.lower() == str(name).strip().lower():
                return variant
        raise ValidationError(f"Unknown denominator variant: {name}")


@dataclass(frozen=True)
class CaseValues:
    """
    Expected kernel entries of a two-class 1-D model.

    v1[c]: diagonal entries of class c; v2[c]: distinct pairs within class c;
    v3: pairs across the two classes.
    """

    v1: Tuple[float, float]
    v2: Tuple[float, float]
    v3: float

    def scaled(self, factor: float) -> "CaseValues":
        return CaseValues(
            v1=(self.v1[0] * factor, self.v1[1] * factor),
            v2=(self.v2[0] * factor, self.v2[1] * factor),
            v3=self.v3 * factor,
        )


@dataclass(frozen=True)
class GaussParams1D:
    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    n1: int
    n2: int
    sigma_w2: float = 1.0

    @property
    def n_total(self) -> int:
        return self.n1 + self.n2

    @property
    def mus(self) -> Tuple[float, float]:
        return (self.mu1, self.mu2)

    @property
    def sigmas(self) -> Tuple[float, float]:
        return (self.sigma1, self.sigma2)

    @property
    def counts(self) -> Tuple[int, int]:
        return (self.n1, self.n2)

    def separation_ratios(self) -> Tuple[float, float]:
        """|mu_c| / sigma_c per class (inf for zero spread)."""
        return tuple(
            abs(mu) / sigma if sigma > 0 else float("inf")
            for mu, sigma in zip(self.mus, self.sigmas)
        )
