"""
(N, d0) sweeps over methods and seeds.

Every (N, d0, seed) cell draws one dataset from its own derived seed and
evaluates all methods on it, so methods are compared on identical data. Cells
fan out to a process pool; records come back in a fixed order regardless of
which worker finished first.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from src.analysis.eos_solver import default_schedule, solve_eos
from src.analysis.fcn import init_fcn, penultimate_features, train
from src.analysis.kernels import assemble_gram
from src.analysis.nc1 import aggregate_log10, features_relative_report, nc1_relative_report
from src.data_collection.mixture_generator import sample_gaussian_mixture
from src.models.config import Config, EosSettings, FcnSettings, Nc1Settings
from src.models.dataset import Dataset, MixtureSpec
from src.models.fcn import FcnArchitecture
from src.models.kernel import Gram, HyperParams, KernelKind
from src.models.report import Nc1Report
from src.models.sweep import MethodSpec, RecordStatus, SweepConfig, SweepRecord, SweepResult
from src.utils.exceptions import (
    ConvergenceError,
    DegenerateBetweenVariance,
    DegenerateInputError,
    KernelNc1Error,
    ValidationError,
)
from src.utils.logger import get_logger
from src.utils.rng import derive_seed

logger = get_logger(__name__)

FCN_INIT_KEY = 1


@dataclass
class CellTask:
    N: int
    d0: int
    seed_index: int
    seed: int
    mixture: MixtureSpec
    preset: str
    methods: List[MethodSpec]
    hyper: HyperParams
    nc1: Nc1Settings
    eos: EosSettings
    fcn: FcnSettings
    eos_sigma2: float


def _status_of(error: Exception) -> RecordStatus:
    if isinstance(error, (DegenerateBetweenVariance, DegenerateInputError)):
        return RecordStatus.DEGENERATE
    if isinstance(error, ConvergenceError):
        return RecordStatus.NON_CONVERGED
    return RecordStatus.FAILED


def _evaluate_method(method: MethodSpec, dataset: Dataset, task: CellTask) -> Nc1Report:
    hyper = task.hyper.with_d0(dataset.d0)
    tau, floor = task.nc1.tau, task.nc1.degeneracy_floor

    if method.family == "kernel":
        gram = assemble_gram(method.kind, dataset, hyper)
        return nc1_relative_report(gram, dataset, tau=tau, floor=floor)

    if method.family == "eos":
        state = solve_eos(dataset, hyper, task.eos_sigma2, default_schedule(method.eos_target), task.eos.solver)
        gram = Gram(values=state.Q, partition=list(dataset.partition), kind=KernelKind.NNGP_ERF, hyper=hyper)
        return nc1_relative_report(gram, dataset, tau=tau, floor=floor)

    arch = FcnArchitecture.uniform(
        d0=dataset.d0,
        depth=method.depth,
        width=method.width,
        activation=method.activation,
        sigma_w2=hyper.sigma_w2,
        sigma_b2=hyper.sigma_b2,
    )
    cfg = method.train or task.fcn.preset(method.activation.value)
    cfg = replace(cfg, seed=derive_seed(task.seed, (FCN_INIT_KEY,)))
    model = init_fcn(arch, cfg.seed)
    trace = train(model, dataset, cfg, tau=tau)
    if trace.final_nc1 is not None:
        return trace.final_nc1
    return features_relative_report(penultimate_features(model, dataset.X), dataset, tau=tau, floor=floor)


def evaluate_cell(task: CellTask) -> List[SweepRecord]:
    """All method records of one (N, d0, seed) cell; never raises."""
    records: List[SweepRecord] = []
    try:
        dataset = sample_gaussian_mixture(task.mixture, task.seed, preset=task.preset)
    except Exception as e:
        logger.error(f"Dataset generation failed for N={task.N} d0={task.d0} seed#{task.seed_index}: {e}")
        return [
            SweepRecord(
                method=m.label, N=task.N, d0=task.d0, seed_index=task.seed_index, seed=task.seed,
                partition=[c.count for c in task.mixture.classes],
                status=RecordStatus.FAILED, message=str(e),
            )
            for m in task.methods
        ]

    for method in task.methods:
        start = time.perf_counter()
        report, status, message = None, RecordStatus.OK, ""
        try:
            report = _evaluate_method(method, dataset, task)
        except Exception as e:
            status, message = _status_of(e), f"{type(e).__name__}: {e}"
            log = logger.warning if isinstance(e, KernelNc1Error) else logger.error
            log(f"{method.label} N={task.N} d0={task.d0} seed#{task.seed_index}: {status.value} ({message})")
        records.append(
            SweepRecord(
                method=method.label,
                N=task.N,
                d0=task.d0,
                seed_index=task.seed_index,
                seed=task.seed,
                partition=list(dataset.partition),
                status=status,
                report=report,
                elapsed_s=time.perf_counter() - start,
                message=message,
            )
        )
    return records


class SweepService:
    def __init__(self, config: Config):
        self.config = config
        logger.info("SweepService initialized")

    def build_tasks(self, sweep: SweepConfig) -> List[CellTask]:
        profile = self.config.profile(sweep.profile)
        tasks: List[CellTask] = []
        for n in sweep.n_grid:
            for d0 in sweep.d0_grid:
                if sweep.class_sizes is None:
                    mixture = profile.to_mixture(n, d0)
                else:
                    if sum(sweep.class_sizes) != n:
                        raise ValidationError(f"Class sizes {sweep.class_sizes} do not sum to N={n}")
                    mixture = MixtureSpec.from_lists(
                        profile.means, profile.stds, sweep.class_sizes, profile.labels, d0
                    )
                for seed_index in range(sweep.seeds):
                    tasks.append(
                        CellTask(
                            N=int(n),
                            d0=int(d0),
                            seed_index=seed_index,
                            seed=derive_seed(sweep.master_seed, (n, d0, seed_index)),
                            mixture=mixture,
                            preset=sweep.profile,
                            methods=list(sweep.methods),
                            hyper=sweep.hyper,
                            nc1=self.config.nc1,
                            eos=self.config.eos,
                            fcn=self.config.fcn,
                            eos_sigma2=sweep.eos_sigma2,
                        )
                    )
        return tasks

    def run_sweep(self, sweep: SweepConfig) -> SweepResult:
        sweep.validate()
        tasks = self.build_tasks(sweep)
        logger.info(
            f"Running sweep '{sweep.profile}': {len(tasks)} cells x {len(sweep.methods)} methods "
            f"on {sweep.workers} worker(s)"
        )

        if sweep.workers > 1:
            with ProcessPoolExecutor(max_workers=sweep.workers) as pool:
                batches = list(pool.map(evaluate_cell, tasks))
        else:
            batches = [evaluate_cell(task) for task in tasks]

        method_order = {m.label: i for i, m in enumerate(sweep.methods)}
        n_order = {n: i for i, n in enumerate(sweep.n_grid)}
        d0_order = {d: i for i, d in enumerate(sweep.d0_grid)}
        records = sorted(
            (r for batch in batches for r in batch),
            key=lambda r: (method_order[r.method], n_order[r.N], d0_order[r.d0], r.seed_index),
        )
        result = SweepResult(config=sweep, records=records)
        logger.info(f"Sweep finished: {result.status_counts()}")
        return result


def run_sweep(sweep: SweepConfig, config: Config) -> SweepResult:
    return SweepService(config).run_sweep(sweep)


def cell_summary(result: SweepResult) -> pd.DataFrame:
    """Mean and std of log10 NC1 (and of log10 relative NC1) per (method, N, d0)."""
    grouped: Dict[Tuple[str, int, int], List[SweepRecord]] = {}
    for record in result.records:
        grouped.setdefault((record.method, record.N, record.d0), []).append(record)

    rows = []
    for (method, n, d0), records in grouped.items():
        reports = [r.report for r in records if r.status is RecordStatus.OK and r.report is not None]
        mean, std = aggregate_log10(reports)
        relative = np.array(
            [np.log10(r.relative_nc1) for r in reports if r.relative_nc1 and r.relative_nc1 > 0],
            dtype=np.float64,
        )
        rel_mean, rel_std = float("nan"), float("nan")
        if relative.size:
            rel_mean = float(relative.mean())
            rel_std = float(relative.std(ddof=1)) if relative.size > 1 else 0.0
        rows.append(
            {
                "method": method,
                "N": n,
                "d0": d0,
                "mean_log10_nc1": mean,
                "std_log10_nc1": std,
                "mean_log10_relative_nc1": rel_mean,
                "std_log10_relative_nc1": rel_std,
                "n_ok": len(reports),
                "n_records": len(records),
            }
        )
    return pd.DataFrame(rows)


def heatmap_frame(summary: pd.DataFrame, method: str, value: str = "mean_log10_nc1") -> pd.DataFrame:
    """N x d0 grid of one summary column for one method."""
    subset = summary[summary["method"] == method]
    grid = subset.pivot(index="N", columns="d0", values=value).sort_index().sort_index(axis=1)
    grid.columns.name = "d0"
    return grid
