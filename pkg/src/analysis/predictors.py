"""
Leading-order predictors of the expected NC1 for the 1-D two-class Gaussian model.

Each kernel family reduces to three expected gram entries per class (diagonal,
distinct within-class pairs, cross-class pairs). ``expected_nc1`` turns any such
triple into a predicted NC1; higher-order remainders are not modelled, so the
Monte Carlo checks in the verification service are the ground truth.
"""

import math
from typing import Tuple, Union

from scipy.special import ndtr

from src.models.kernel import KernelKind
from src.models.predictor import CaseValues, DenominatorVariant, GaussParams1D
from src.utils.exceptions import CalculationError, DegenerateBetweenVariance, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

ASSUMPTION_RATIO = 3.0
DENOMINATOR_FLOOR = 1e-30


def t_moment(mu: float, sigma: float) -> float:
    """Second-order approximation of E[1/x^2] for x ~ N(mu, sigma^2)."""
    s = mu * mu + sigma * sigma
    if not s > 0:
        raise CalculationError(f"t_moment needs mu^2 + sigma^2 > 0, got mu={mu}, sigma={sigma}")
    return 1.0 / s + (2.0 * sigma ** 4 + 4.0 * sigma ** 2 * mu ** 2) / s ** 3


def check_assumptions(p: GaussParams1D, ratio: float = ASSUMPTION_RATIO) -> bool:
    """Warn when a class is not well separated from the origin (|mu| / sigma below ``ratio``)."""
    if p.n1 < 1 or p.n2 < 1:
        raise ValidationError(f"Class counts must be >= 1, got ({p.n1}, {p.n2})")
    if any(s < 0 for s in p.sigmas):
        raise ValidationError(f"Class spreads must be >= 0, got {p.sigmas}")
    ok = True
    for index, value in enumerate(p.separation_ratios()):
        if value < ratio:
            logger.warning(
                f"Class {index + 1}: |mu|/sigma = {value:.3g} < {ratio:g}; "
                f"leading-order predictor may be inaccurate"
            )
            ok = False
    return ok


def _kernel_family(kernel: Union[str, KernelKind]) -> str:
    if isinstance(kernel, KernelKind):
        if kernel.activation is None:
            raise ValidationError("Linear kernel has no ReLU case values; use data_case_values")
        return "ntk" if kernel.is_ntk else "nngp"
    family = str(kernel).strip().lower()
    if family not in ("nngp", "ntk"):
        raise ValidationError(f"Kernel family must be 'nngp' or 'ntk', got {kernel}")
    return family


def relu_case_values(p: GaussParams1D, kernel: Union[str, KernelKind] = "nngp") -> CaseValues:
    check_assumptions(p)
    w = p.sigma_w2
    factor = w / 2.0 if _kernel_family(kernel) == "nngp" else w * w / 2.0 + w / 2.0
    return CaseValues(
        v1=tuple(factor * (s * s + m * m) for m, s in zip(p.mus, p.sigmas)),
        v2=tuple(factor * m * m for m in p.mus),
        v3=0.0,
    )


def erf_case_values(p: GaussParams1D) -> CaseValues:
    check_assumptions(p)
    w = p.sigma_w2
    t1, t2 = (t_moment(m, s) for m, s in zip(p.mus, p.sigmas))
    v1 = tuple(1.0 - t / (2.0 * w) for t in (t1, t2))
    v2 = tuple(a - t * t / (16.0 * w * w) for a, t in zip(v1, (t1, t2)))
    # cross pairs carry the sign of mu1 * mu2
    sign = math.copysign(1.0, p.mu1 * p.mu2)
    v3 = sign * (1.0 - (t1 + t2) / (4.0 * w) - t1 * t2 / (16.0 * w * w))
    return CaseValues(v1=v1, v2=v2, v3=v3)


def data_case_values(p: GaussParams1D) -> CaseValues:
    return CaseValues(
        v1=tuple(s * s + m * m for m, s in zip(p.mus, p.sigmas)),
        v2=tuple(m * m for m in p.mus),
        v3=p.mu1 * p.mu2,
    )


def _guard(denominator: float, what: str) -> float:
    if abs(denominator) <= DENOMINATOR_FLOOR:
        raise DegenerateBetweenVariance(f"{what}: denominator {denominator:.3g} is degenerate")
    return denominator


def expected_nc1(cases: CaseValues, n1: int, n2: int) -> float:
    """Expected NC1 of a two-class gram whose entries average to ``cases``."""
    if n1 < 1 or n2 < 1:
        raise ValidationError(f"Class counts must be >= 1, got ({n1}, {n2})")
    n_total = n1 + n2
    numerator = 0.0
    denominator = 0.0
    for n, v1, v2 in zip((n1, n2), cases.v1, cases.v2):
        block = n * (n - 1) * v2 + n * v1
        numerator += n * v1 / n_total - block / (2.0 * n * n)
        denominator += (1.0 / (2.0 * n * n) - 1.0 / n_total ** 2) * block
    denominator -= 2.0 * n1 * n2 / n_total ** 2 * cases.v3
    return numerator / _guard(denominator, "expected_nc1")


def theorem2_expected_nc1(
    p: GaussParams1D,
    variant: Union[str, DenominatorVariant] = DenominatorVariant.AS_PRINTED,
) -> float:
    """
    Closed-form ReLU NC1 at leading order.

    ``as-printed`` keeps the cross-class term in the denominator;
    ``appendix-D`` drops it, as the derivation with zero cross-class
    entries implies.
    """
    variant = DenominatorVariant.from_name(variant) if isinstance(variant, str) else variant
    check_assumptions(p)
    n_total = p.n_total
    numerator = sum(
        (n * m * m + n * s * s) / n_total - m * m / 2.0
        for n, m, s in zip(p.counts, p.mus, p.sigmas)
    )
    denominator = sum(m * m / 2.0 - n * n * m * m / n_total ** 2 for n, m in zip(p.counts, p.mus))
    if variant is DenominatorVariant.AS_PRINTED:
        denominator -= 2.0 / n_total ** 2 * (p.n1 * p.mu1) * (p.n2 * p.mu2)
    return numerator / _guard(denominator, f"theorem2 ({variant.value})")


def corollary1_ratio(p: GaussParams1D) -> float:
    """Predicted NNGP-ReLU NC1 relative to the data NC1."""
    check_assumptions(p)
    n_total = p.n_total
    cross = 2.0 / n_total ** 2 * p.n1 * p.n2 * p.mu1 * p.mu2
    base = sum(m * m / 2.0 - n * n * m * m / n_total ** 2 for n, m in zip(p.counts, p.mus))
    return 1.0 - cross / _guard(base, "corollary1")


def sign_violation_probability(p: GaussParams1D) -> float:
    """Largest per-class probability that a sample lands on the wrong side of 0."""
    probs = [
        float(ndtr(-abs(m) / s)) if s > 0 else 0.0
        for m, s in zip(p.mus, p.sigmas)
    ]
    return max(probs)


def erf_truncation_bound(p: GaussParams1D) -> float:
    """Size of the terms dropped by the Erf case values, plus sign violations."""
    t_max = max(t_moment(m, s) for m, s in zip(p.mus, p.sigmas))
    return 2.0 * (t_max / (2.0 * p.sigma_w2)) ** 2 + 2.0 * sign_violation_probability(p)


def relu_truncation_bound(p: GaussParams1D, cases: CaseValues) -> float:
    """Sign violations scaled by the largest expected entry."""
    scale = max(max(abs(v) for v in cases.v1), abs(cases.v3))
    return 2.0 * sign_violation_probability(p) * scale


def balanced_params(mu: float, sigma: float, n_total: int, sigma_w2: float = 1.0) -> GaussParams1D:
    """Symmetric two-class parameters: means -mu and +mu, equal spreads and counts."""
    if n_total % 2:
        raise ValidationError(f"Balanced parameters need an even N, got {n_total}")
    half = n_total // 2
    return GaussParams1D(
        mu1=-abs(mu), mu2=abs(mu), sigma1=sigma, sigma2=sigma, n1=half, n2=half, sigma_w2=sigma_w2
    )


def predicted_pair(p: GaussParams1D) -> Tuple[float, float]:
    """Both denominator variants, in (as-printed, appendix-D) order."""
    return (
        theorem2_expected_nc1(p, DenominatorVariant.AS_PRINTED),
        theorem2_expected_nc1(p, DenominatorVariant.APPENDIX_D),
    )
