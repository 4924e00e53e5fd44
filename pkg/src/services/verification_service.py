"""
Oracle comparisons for the NC1 identities, the analytic predictors and the
EoS gradient.

Every suite returns a JSON-ready report: a list of checks, each with the
predicted and measured values, and an overall pass flag computed from the
gated checks. Informational checks carry ``gated: False``.
"""

from dataclasses import replace
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from src.analysis.eos_solver import (
    central_difference,
    default_schedule,
    eos_q_and_predictions,
    q_derivative_wrt_c,
    q_gradient_contraction,
    solve_eos,
)
from src.analysis.fcn import init_fcn, penultimate_features, train
from src.analysis.kernels import assemble_gram, erf_correlation, kernel_from_pre, kernel_matrix
from src.analysis.nc1 import nc1_of_features, nc1_of_gram, nc1_relative_report
from src.analysis.predictors import (
    balanced_params,
    corollary1_ratio,
    data_case_values,
    erf_case_values,
    erf_truncation_bound,
    expected_nc1,
    relu_case_values,
    relu_truncation_bound,
    theorem2_expected_nc1,
)
from src.data_collection.mixture_generator import make_d1, sample_gaussian_mixture
from src.models.config import Config
from src.models.dataset import Dataset, MixtureSpec
from src.models.eos import AnnealSchedule
from src.models.fcn import FcnArchitecture
from src.models.kernel import Activation, Gram, HyperParams, KernelKind
from src.models.predictor import CaseValues, DenominatorVariant, GaussParams1D
from src.utils.exceptions import CalculationError, KernelNc1Error, ValidationError
from src.utils.logger import get_logger
from src.utils.rng import derive_seed, standard_normal, stream

logger = get_logger(__name__)

Check = Dict[str, Any]

THEOREM1_TOLERANCE = 1e-10
GRADIENT_TOLERANCE = 1e-6
CONSISTENCY_TOLERANCE = 1e-8
Z_LIMIT = 3.0
NTK_GAP_LIMIT = 0.1
TREND_SLACK = 0.02
RELATIVE_TOLERANCE = 0.2
NONSEPARABLE_TRACK_LIMIT = 0.3
NONSEPARABLE_UNDER_GAP = 0.2

_SUITE_KEYS = {
    "theorem1": 101,
    "theorem2": 202,
    "corollary1": 303,
    "erf-cases": 404,
    "relu-cases": 505,
    "eos-gradient": 606,
    "ntk-vs-nngp": 707,
    "relative-nc1": 808,
    "nonseparable": 909,
}


def _check(name: str, passed: bool, gated: bool = True, **fields: Any) -> Check:
    row = {"name": name, "passed": bool(passed), "gated": gated}
    for key, value in fields.items():
        if isinstance(value, (np.floating, np.integer)):
            value = value.item()
        row[key] = value
    return row


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def _z(predicted: float, mean: float, se: float) -> float:
    if not se > 0:
        return 0.0 if predicted == mean else float("inf")
    return (predicted - mean) / se


def _relative(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def _standard_error_summary(suite: str, checks: List[Check]) -> Check:
    """
    Informational roll-up of the per-case 3-SE criterion.

    The per-case checks pass within 3 SE plus the leading-order truncation
    bound; this row reports whether the Monte Carlo means agree within 3 SE alone.
    """
    z_scores = {c["name"]: c["z_score"] for c in checks}
    outside = sorted(name for name, z in z_scores.items() if not abs(z) <= Z_LIMIT)
    if outside:
        logger.warning(f"{suite}: {len(outside)} of {len(z_scores)} cases lie beyond {Z_LIMIT:g} SE: {outside}")
    return _check("within 3 SE", not outside, gated=False, z_scores=z_scores, outside=outside, z_limit=Z_LIMIT)


class VerificationService:
    SUITES = tuple(_SUITE_KEYS)

    def __init__(self, config: Config, seed: int = 0):
        self.config = config
        self.seed = int(seed)
        self._handlers: Dict[str, Callable[[], List[Check]]] = {
            "theorem1": self.theorem1,
            "theorem2": self.theorem2,
            "corollary1": self.corollary1,
            "erf-cases": self.erf_cases,
            "relu-cases": self.relu_cases,
            "eos-gradient": self.eos_gradient,
            "ntk-vs-nngp": self.ntk_vs_nngp,
            "relative-nc1": self.relative_nc1,
            "nonseparable": self.nonseparable,
        }
        logger.info(f"VerificationService initialized (seed={self.seed})")

    def run_verify(self, suite: str) -> Dict[str, Any]:
        suite = str(suite).strip().lower()
        if suite == "all":
            reports = [self.run_verify(name) for name in self.SUITES]
            return {"suite": "all", "seed": self.seed, "passed": all(r["passed"] for r in reports), "suites": reports}
        if suite not in self._handlers:
            raise ValidationError(f"Unknown verify suite '{suite}'; choose from {list(self.SUITES)} or 'all'")

        logger.info(f"Running verify suite '{suite}'")
        try:
            checks = self._handlers[suite]()
        except KernelNc1Error:
            raise
        except Exception as e:
            error_msg = f"Verify suite '{suite}' failed unexpectedly: {e}"
            logger.error(error_msg)
            raise CalculationError(error_msg) from e

        passed = all(c["passed"] for c in checks if c["gated"])
        logger.info(f"Suite '{suite}': {'PASS' if passed else 'FAIL'} ({len(checks)} checks)")
        return {"suite": suite, "seed": self.seed, "passed": passed, "checks": checks}

    # -- helpers ------------------------------------------------------------

    def _seed(self, suite: str, *keys: int) -> int:
        return derive_seed(self.seed, (_SUITE_KEYS[suite], *keys))

    def _hyper(self, d0: int) -> HyperParams:
        return self.config.hyper.with_d0(d0)

    def _two_class(self, p: GaussParams1D, d0: int, seed: int) -> Dataset:
        spec = MixtureSpec.from_lists(p.mus, p.sigmas, p.counts, (-1.0, 1.0), d0)
        return sample_gaussian_mixture(spec, seed, preset="verify")

    # -- suites -------------------------------------------------------------

    def theorem1(self) -> List[Check]:
        """Kernel-trace NC1 against explicit covariances on random features."""
        worst = 0.0
        for k in range(self.config.verify.theorem1_instances):
            g = stream(self._seed("theorem1"), k)
            n_classes = int(g.integers(2, 5))
            d = int(g.integers(1, 9))
            partition = [int(n) for n in g.integers(2, 64 // n_classes + 1, size=n_classes)]
            offsets = 2.0 * standard_normal(g, (n_classes, d))
            H = standard_normal(g, (sum(partition), d)) + np.repeat(offsets, partition, axis=0)

            hyper = HyperParams(d0=d)
            gram = Gram(kernel_matrix(KernelKind.LINEAR, H.T, hyper), partition, KernelKind.LINEAR, hyper)
            via_gram = nc1_of_gram(gram)
            via_features = nc1_of_features(H, partition)
            scale = via_features.tr_total
            deviation = max(
                _relative(via_gram.nc1, via_features.nc1),
                abs(via_gram.tr_within - via_features.tr_within) / scale,
                abs(via_gram.tr_between - via_features.tr_between) / scale,
            )
            worst = max(worst, deviation)

        return [
            _check(
                "kernel trace vs covariance",
                worst < THEOREM1_TOLERANCE,
                instances=self.config.verify.theorem1_instances,
                max_relative_deviation=worst,
                tolerance=THEOREM1_TOLERANCE,
            )
        ]

    def _relu_gram_nc1(self, p: GaussParams1D, suite: str) -> np.ndarray:
        values = []
        for draw in range(self.config.verify.mc_draws):
            dataset = self._two_class(p, 1, self._seed(suite, draw))
            gram = assemble_gram(KernelKind.NNGP_RELU, dataset, self._hyper(1))
            values.append(nc1_of_gram(gram, tau=self.config.nc1.tau).nc1)
        return np.asarray(values)

    def theorem2(self) -> List[Check]:
        """Which denominator variant the Monte Carlo NNGP-ReLU NC1 supports."""
        v = self.config.verify
        p = balanced_params(v.relu_mu, v.relu_sigma, v.n_samples, self.config.hyper.sigma_w2)
        mean, se = _mean_se(self._relu_gram_nc1(p, "theorem2"))

        checks: List[Check] = []
        supported = []
        for variant in DenominatorVariant:
            predicted = theorem2_expected_nc1(p, variant)
            z = _z(predicted, mean, se)
            within = abs(z) <= Z_LIMIT
            if within:
                supported.append(variant.value)
            checks.append(
                _check(
                    f"variant {variant.value}",
                    within,
                    gated=False,
                    predicted=predicted,
                    mc_mean=mean,
                    mc_std_error=se,
                    z_score=z,
                )
            )
        checks.append(
            _check(
                "adjudication",
                len(supported) == 1,
                supported_variant=supported[0] if len(supported) == 1 else None,
                supported=supported,
                draws=v.mc_draws,
                n_samples=v.n_samples,
            )
        )
        return checks

    def corollary1(self) -> List[Check]:
        """Closed-form relative NC1 and its consistency with the case-value predictors."""
        v = self.config.verify
        w = self.config.hyper.sigma_w2
        balanced = balanced_params(v.relu_mu, v.relu_sigma, v.n_samples, w)
        ratio = corollary1_ratio(balanced)

        large = balanced_params(v.relu_mu, v.relu_sigma, 2 * 10 ** 9, w)
        composed = expected_nc1(relu_case_values(large, "nngp"), large.n1, large.n2) / expected_nc1(
            data_case_values(large), large.n1, large.n2
        )
        closed = corollary1_ratio(large)

        skewed = GaussParams1D(
            mu1=-v.relu_mu, mu2=2.0 * v.relu_mu, sigma1=v.relu_sigma, sigma2=v.relu_sigma,
            n1=1, n2=10 ** 9, sigma_w2=w,
        )
        skewed_ratio = corollary1_ratio(skewed)
        return [
            _check("balanced symmetric ratio", abs(ratio - 2.0) < 1e-12, predicted=ratio, expected=2.0),
            _check(
                "case-value composition",
                _relative(composed, closed) < CONSISTENCY_TOLERANCE,
                composed=composed,
                closed_form=closed,
                relative_deviation=_relative(composed, closed),
                n_per_class=large.n1,
            ),
            _check("vanishing minority class", abs(skewed_ratio - 1.0) < 1e-6, predicted=skewed_ratio, expected=1.0),
        ]

    def _pair_samples(self, p: GaussParams1D, suite: str) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
        """Independent 1-D sample pairs for the diagonal, within-class and cross-class cases."""
        pairs = self.config.verify.mc_pairs
        g = stream(self._seed(suite))
        draws = {}
        for c, (mu, sigma) in enumerate(zip(p.mus, p.sigmas)):
            x = mu + sigma * standard_normal(g, pairs)
            x_other = mu + sigma * standard_normal(g, pairs)
            draws[f"class{c + 1}"] = (x, x_other)
        return {
            "diag1": (draws["class1"][0], draws["class1"][0]),
            "diag2": (draws["class2"][0], draws["class2"][0]),
            "within1": draws["class1"],
            "within2": draws["class2"],
            "cross": (draws["class1"][1], draws["class2"][1]),
        }

    @staticmethod
    def _predicted(cases: CaseValues, case: str) -> float:
        if case == "cross":
            return cases.v3
        index = int(case[-1]) - 1
        return cases.v1[index] if case.startswith("diag") else cases.v2[index]

    def _pre(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        h = self.config.hyper
        return h.sigma_b2 + h.sigma_w2 * x * y, h.sigma_b2 + h.sigma_w2 * x * x, h.sigma_b2 + h.sigma_w2 * y * y

    def erf_cases(self) -> List[Check]:
        """
        Erf case values against Monte Carlo.

        The leading-order values track the mean of the normalized correlation
        u (the arcsin argument); the mean of Q itself is reported alongside.
        """
        v = self.config.verify
        p = balanced_params(v.erf_mu, v.erf_sigma, 2, self.config.hyper.sigma_w2)
        cases = erf_case_values(p)
        bound = erf_truncation_bound(p)

        checks = []
        for case, (x, y) in self._pair_samples(p, "erf-cases").items():
            u = erf_correlation(*self._pre(x, y))
            q = (2.0 / np.pi) * np.arcsin(u)
            predicted = self._predicted(cases, case)
            u_mean, u_se = _mean_se(u)
            q_mean, q_se = _mean_se(q)
            z = _z(predicted, u_mean, u_se)
            checks.append(
                _check(
                    case,
                    abs(predicted - u_mean) <= Z_LIMIT * u_se + bound,
                    predicted=predicted,
                    mc_mean=u_mean,
                    mc_std_error=u_se,
                    z_score=z,
                    within_3se=abs(z) <= Z_LIMIT,
                    truncation_bound=bound,
                    mc_mean_q=q_mean,
                    mc_std_error_q=q_se,
                    z_score_q=_z(predicted, q_mean, q_se),
                )
            )
        checks.append(_standard_error_summary("erf-cases", checks))
        return checks

    def relu_cases(self) -> List[Check]:
        """ReLU NNGP and NTK case values against Monte Carlo kernel entries."""
        v = self.config.verify
        p = balanced_params(v.relu_mu, v.relu_sigma, 2, self.config.hyper.sigma_w2)
        samples = self._pair_samples(p, "relu-cases")
        hyper = self._hyper(1)

        checks = []
        for kind in (KernelKind.NNGP_RELU, KernelKind.NTK_RELU):
            cases = relu_case_values(p, kind)
            bound = relu_truncation_bound(p, cases)
            for case, (x, y) in samples.items():
                values = kernel_from_pre(kind, *self._pre(x, y), hyper)
                predicted = self._predicted(cases, case)
                mean, se = _mean_se(values)
                z = _z(predicted, mean, se)
                checks.append(
                    _check(
                        f"{kind.label} {case}",
                        abs(predicted - mean) <= Z_LIMIT * se + bound,
                        predicted=predicted,
                        mc_mean=mean,
                        mc_std_error=se,
                        z_score=z,
                        within_3se=abs(z) <= Z_LIMIT,
                        truncation_bound=bound,
                    )
                )
        checks.append(_standard_error_summary("relu-cases", checks))
        return checks

    def eos_gradient(self) -> List[Check]:
        """dQ/dC_ij against central differences, and the trace contraction against dQ/dC."""
        d0, n = 4, 16
        sigma2 = self.config.eos.sigma2
        worst_q, worst_trace, worst_numeric_trace = 0.0, 0.0, 0.0
        for k in range(self.config.verify.gradient_instances):
            g = stream(self._seed("eos-gradient"), k)
            X = standard_normal(g, (d0, n))
            labels = np.repeat([-1.0, 1.0], n // 2)
            dataset = Dataset(X=X, labels=labels, partition=[n // 2, n // 2])
            hyper = self._hyper(d0)
            M = standard_normal(g, (d0, d0))
            C = (hyper.sigma_w2 / d0) * (np.eye(d0) + 0.05 * (M + M.T))
            step = 1e-6 * float(np.linalg.norm(C))

            def q_of(Cp: np.ndarray) -> np.ndarray:
                return eos_q_and_predictions(Cp, dataset, hyper, sigma2)[1]

            A0 = eos_q_and_predictions(C, dataset, hyper, sigma2)[3]
            contraction = q_gradient_contraction(C, dataset, hyper, sigma2)
            c_scale = max(float(np.max(np.abs(contraction))), 1e-300)
            for i in range(d0):
                for j in range(i, d0):
                    analytic = q_derivative_wrt_c(C, dataset, hyper, i, j)
                    numeric = central_difference(q_of, C, i, j, step)
                    scale = max(float(np.max(np.abs(numeric))), 1e-300)
                    worst_q = max(worst_q, float(np.max(np.abs(analytic - numeric))) / scale)

                    worst_trace = max(worst_trace, abs(contraction[i, j] - float(np.sum(A0 * analytic))) / c_scale)
                    worst_numeric_trace = max(
                        worst_numeric_trace, abs(contraction[i, j] - float(np.sum(A0 * numeric))) / c_scale
                    )

        if worst_numeric_trace >= GRADIENT_TOLERANCE:
            logger.warning(
                f"Trace contraction vs finite differences: {worst_numeric_trace:.3g} "
                f"(step noise, limit {GRADIENT_TOLERANCE:g})"
            )
        return [
            _check("dQ/dC", worst_q < GRADIENT_TOLERANCE, max_relative_error=worst_q, tolerance=GRADIENT_TOLERANCE),
            _check(
                "d tr(AQ)/dC",
                worst_trace < CONSISTENCY_TOLERANCE,
                max_relative_error=worst_trace,
                tolerance=CONSISTENCY_TOLERANCE,
            ),
            _check(
                "d tr(AQ)/dC vs finite differences",
                worst_numeric_trace < GRADIENT_TOLERANCE,
                gated=False,
                max_relative_error=worst_numeric_trace,
                tolerance=GRADIENT_TOLERANCE,
            ),
        ]

    def ntk_vs_nngp(self) -> List[Check]:
        """NTK against NNGP gram NC1 on D1 across input dimensions."""
        v = self.config.verify
        kinds = (KernelKind.NNGP_RELU, KernelKind.NTK_RELU, KernelKind.NNGP_ERF, KernelKind.NTK_ERF)
        means: Dict[KernelKind, Dict[int, float]] = {kind: {} for kind in kinds}
        for d0 in v.ntk_d0_grid:
            logs: Dict[KernelKind, List[float]] = {kind: [] for kind in kinds}
            for draw in range(v.mc_draws):
                dataset = make_d1(v.n_samples, d0, self._seed("ntk-vs-nngp", d0, draw))
                for kind in kinds:
                    gram = assemble_gram(kind, dataset, self._hyper(d0))
                    logs[kind].append(nc1_of_gram(gram, tau=self.config.nc1.tau).log10_nc1)
            for kind in kinds:
                means[kind][d0] = float(np.mean(logs[kind]))

        grid = list(v.ntk_d0_grid)
        relu_gaps = [means[KernelKind.NTK_RELU][d] - means[KernelKind.NNGP_RELU][d] for d in grid]
        erf_gaps = [means[KernelKind.NTK_ERF][d] - means[KernelKind.NNGP_ERF][d] for d in grid]
        trend_ok = all(b >= a - TREND_SLACK for a, b in zip(relu_gaps[:-1], relu_gaps[1:]))
        for label, gap in (("ReLU", relu_gaps[0]), ("Erf", erf_gaps[0])):
            if abs(gap) >= NTK_GAP_LIMIT:
                logger.warning(f"{label} NTK - NNGP gap at d0={grid[0]} is {gap:.3f} dex (limit {NTK_GAP_LIMIT})")

        return [
            _check(
                "ReLU gap at smallest d0",
                abs(relu_gaps[0]) < NTK_GAP_LIMIT,
                d0=grid[0],
                gap_log10=relu_gaps[0],
                limit=NTK_GAP_LIMIT,
            ),
            _check(
                "Erf gap at smallest d0",
                abs(erf_gaps[0]) < NTK_GAP_LIMIT,
                d0=grid[0],
                gap_log10=erf_gaps[0],
                limit=NTK_GAP_LIMIT,
            ),
            _check("Erf NTK not more collapsed", all(g >= -NTK_GAP_LIMIT for g in erf_gaps), gaps_log10=erf_gaps),
            _check(
                "ReLU gap non-decreasing in d0",
                trend_ok and relu_gaps[-1] >= 0.0,
                d0_grid=grid,
                gaps_log10=relu_gaps,
                slack=TREND_SLACK,
            ),
            _check(
                "mean log10 NC1",
                True,
                gated=False,
                values={kind.label: [means[kind][d] for d in grid] for kind in kinds},
            ),
        ]

    def relative_nc1(self) -> List[Check]:
        """Measured relative NC1 against the closed-form ratio."""
        v = self.config.verify
        p = balanced_params(v.relu_mu, v.relu_sigma, v.n_samples, self.config.hyper.sigma_w2)
        predicted = corollary1_ratio(p)
        measured = []
        for draw in range(v.mc_draws):
            dataset = self._two_class(p, 1, self._seed("relative-nc1", draw))
            gram = assemble_gram(KernelKind.NNGP_RELU, dataset, self._hyper(1))
            measured.append(nc1_relative_report(gram, dataset, tau=self.config.nc1.tau).relative_nc1)
        mean, se = _mean_se(np.asarray(measured))
        checks = [
            _check(
                "NNGP-ReLU relative NC1",
                abs(mean - predicted) <= RELATIVE_TOLERANCE,
                predicted=predicted,
                mc_mean=mean,
                mc_std_error=se,
                tolerance=RELATIVE_TOLERANCE,
            )
        ]

        if "collapsed_data" in self.config.profiles:
            profile = self.config.profile("collapsed_data")
            spec = profile.to_mixture(v.n_samples, 128)
            dataset = sample_gaussian_mixture(spec, self._seed("relative-nc1", 10 ** 6), preset="collapsed_data")
            gram = assemble_gram(KernelKind.NNGP_ERF, dataset, self._hyper(128))
            report = nc1_relative_report(gram, dataset, tau=self.config.nc1.tau)
            checks.append(
                _check(
                    "NNGP-Erf on collapsed data",
                    report.relative_nc1 > 1.0,
                    relative_nc1=report.relative_nc1,
                    nc1=report.nc1,
                    nc1_data=report.nc1_data,
                )
            )
        return checks

    def _fcn_log10_nc1(self, dataset: Dataset, hyper: HyperParams, seed: int) -> float:
        arch = FcnArchitecture.uniform(
            d0=dataset.d0,
            depth=self.config.fcn.depth,
            width=self.config.fcn.width,
            activation=Activation.ERF,
            sigma_w2=hyper.sigma_w2,
            sigma_b2=hyper.sigma_b2,
        )
        cfg = replace(self.config.fcn.preset("nonseparable"), seed=seed)
        model = init_fcn(arch, cfg.seed)
        trace = train(model, dataset, cfg, tau=self.config.nc1.tau)
        report = trace.final_nc1
        if report is None:
            report = nc1_of_features(penultimate_features(model, dataset.X), dataset.partition, tau=self.config.nc1.tau)
        return report.log10_nc1

    def nonseparable(self) -> List[Check]:
        """EoS against a trained Erf FCN on the overlapping-classes mixture; failures only warn."""
        v = self.config.verify
        eos = self.config.eos
        profile = self.config.profile("nonseparable")
        schedule = AnnealSchedule(list(eos.schedule)) if eos.schedule else default_schedule(eos.target_d1)

        gaps: Dict[int, Any] = {}
        for d0 in v.nonseparable_d0_grid:
            seed = self._seed("nonseparable", d0)
            dataset = sample_gaussian_mixture(profile.to_mixture(v.nonseparable_n, d0), seed, preset="nonseparable")
            hyper = self._hyper(d0)
            try:
                state = solve_eos(dataset, hyper, eos.sigma2, schedule, eos.solver)
                gram = Gram(state.Q, list(dataset.partition), KernelKind.NNGP_ERF, hyper)
                eos_log = nc1_of_gram(gram, tau=self.config.nc1.tau).log10_nc1
                fcn_log = self._fcn_log10_nc1(dataset, hyper, derive_seed(seed, (1,)))
            except KernelNc1Error as e:
                logger.warning(f"Non-separable d0={d0} skipped: {type(e).__name__}: {e}")
                gaps[d0] = None
                continue
            gaps[d0] = fcn_log - eos_log
            logger.info(f"Non-separable d0={d0}: FCN {fcn_log:.3f}, EoS {eos_log:.3f} (log10 NC1)")

        low = {d: g for d, g in gaps.items() if d < v.nonseparable_split_d0}
        high = {d: g for d, g in gaps.items() if d >= v.nonseparable_split_d0}
        tracks = bool(low) and all(g is not None and abs(g) <= NONSEPARABLE_TRACK_LIMIT for g in low.values())
        under = bool(high) and all(g is not None and g >= NONSEPARABLE_UNDER_GAP for g in high.values())

        checks: List[Check] = []
        if low:
            checks.append(
                _check(
                    "EoS tracks FCN",
                    tracks,
                    gated=False,
                    gaps_log10=low,
                    limit=NONSEPARABLE_TRACK_LIMIT,
                )
            )
        if high:
            checks.append(
                _check(
                    "EoS underestimates FCN",
                    under,
                    gated=False,
                    gaps_log10=high,
                    min_gap=NONSEPARABLE_UNDER_GAP,
                )
            )
        for check in checks:
            if not check["passed"]:
                logger.warning(f"Non-separable '{check['name']}' not reproduced; FCN - EoS gaps: {gaps}")
        return checks
