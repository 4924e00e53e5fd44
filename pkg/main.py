import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.analysis.fcn import penultimate_features
from src.analysis.nc1 import features_relative_report
from src.models.dataset import Dataset
from src.models.kernel import Activation, KernelKind
from src.models.sweep import MethodSpec
from src.services.dataset_service import DatasetService
from src.services.eos_service import EosService
from src.services.export_service import ExportService
from src.services.fcn_service import FcnService
from src.services.kernel_service import KernelService
from src.services.sweep_service import SweepService
from src.services.verification_service import VerificationService
from src.data_collection.matrix_store import write_json
from src.utils.config_loader import build_sweep_config, load_config
from src.utils.exceptions import KernelNc1Error
from src.utils.logger import setup_logger
from src.visualization.charts import Visualizer

EXIT_OK = 0
EXIT_FAILURE = 1


def _int_list(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    return [int(part) for part in text.split(",") if part.strip()]


def _float_list(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    return [float(part) for part in text.split(",") if part.strip()]


def _dataset(args, config, logger) -> Dataset:
    service = DatasetService(config)
    if getattr(args, "dataset", None):
        return service.load(Path(args.dataset))
    return service.generate(args.preset, args.n, args.d0, args.seed, class_sizes=_int_list(args.class_sizes))


def run_gen(args, config, logger) -> int:
    dataset = _dataset(args, config, logger)
    matrix_path, header_path = DatasetService(config).save(dataset, Path(args.out) / args.name)
    logger.info(f"Dataset written: {matrix_path}, {header_path}")
    return EXIT_OK


def run_gram(args, config, logger) -> int:
    dataset = _dataset(args, config, logger)
    service = KernelService(config)
    gram = service.build_gram(KernelKind.from_name(args.kind), dataset)
    service.save(gram, Path(args.out) / f"gram_{gram.kind.value}")
    if args.plot:
        visualizer = Visualizer(config, Path(args.out))
        fig = visualizer.create_gram_heatmap(gram)
        for fmt in config.visualization.output_format:
            visualizer.save_figure(fig, f"gram_{gram.kind.value}", fmt)
    return EXIT_OK


def run_nc1(args, config, logger) -> int:
    service = KernelService(config)
    dataset = _dataset(args, config, logger) if (args.dataset or args.gram is None) else None
    if args.gram:
        gram = service.load(Path(args.gram))
    else:
        gram = service.build_gram(KernelKind.from_name(args.kind), dataset)
    report = service.nc1(gram, dataset)

    payload = {"kind": gram.kind.value, "N": gram.size, "d0": gram.hyper.d0, "partition": gram.partition}
    if dataset is not None:
        payload["seed"] = dataset.meta.seed
    payload.update(report.to_dict())
    path = write_json(payload, Path(args.out) / "nc1.json")
    logger.info(f"NC1 = {report.nc1:.6g} (log10 {report.log10_nc1:.4f}); report written to {path}")
    return EXIT_OK


def run_sweep(args, config, logger) -> int:
    sweep = build_sweep_config(config, Path(args.out), master_seed=args.seed, workers=args.threads)
    if args.profile:
        sweep.profile = args.profile
        config.profile(args.profile)
    if args.n_grid:
        sweep.n_grid = _int_list(args.n_grid)
    if args.d0_grid:
        sweep.d0_grid = _int_list(args.d0_grid)
    if args.seeds:
        sweep.seeds = args.seeds
    if args.methods:
        sweep.methods = [MethodSpec.parse(m) for m in args.methods.split(",")]
    if args.class_sizes:
        sweep.class_sizes = _int_list(args.class_sizes)

    logger.info("=" * 60)
    logger.info(f"Sweep: profile={sweep.profile} N={sweep.n_grid} d0={sweep.d0_grid} seeds={sweep.seeds}")
    logger.info(f"Methods: {[m.label for m in sweep.methods]}")
    logger.info("=" * 60)

    logger.info("[1/2] Evaluating cells...")
    result = SweepService(config).run_sweep(sweep)

    logger.info("[2/2] Writing outputs...")
    formats = [] if args.no_plots else None
    ExportService(config, Path(args.out)).emit_outputs(result, formats=formats)

    counts = result.status_counts()
    logger.info(f"Status counts: {counts}")
    if result.all_ok or args.allow_partial:
        return EXIT_OK
    logger.error("Some records did not finish with status ok (use --allow-partial to accept)")
    return EXIT_FAILURE


def run_eos(args, config, logger) -> int:
    dataset = _dataset(args, config, logger)
    service = EosService(config)
    state = service.solve(
        dataset,
        target_d1=args.target_d1,
        sigma_a2=args.sigma_a2,
        sigma2=args.sigma2,
        schedule=_float_list(args.schedule),
        tolerance=args.tolerance,
    )
    report = service.nc1(state, dataset)
    service.export(
        state,
        Path(args.out),
        extra={"N": dataset.n_samples, "d0": dataset.d0, "seed": dataset.meta.seed, "nc1": report.to_dict()},
    )
    logger.info(f"EoS NC1 = {report.nc1:.6g} (log10 {report.log10_nc1:.4f})")
    return EXIT_OK


def run_train_fcn(args, config, logger) -> int:
    dataset = _dataset(args, config, logger)
    service = FcnService(config)
    activation = Activation.from_name(args.activation)
    cfg = service.train_config(
        activation,
        preset=args.train_preset,
        learning_rate=args.lr,
        weight_decay=args.weight_decay,
        steps=args.steps,
        seed=args.seed,
    )
    arch = service.architecture(dataset.d0, activation, depth=args.depth, width=args.width)
    model, trace = service.run(dataset, arch, cfg)
    if trace.final_nc1 is None:
        # surfaces the degeneracy as an error
        features_relative_report(penultimate_features(model, dataset.X), dataset, tau=config.nc1.tau)
    service.export(trace, Path(args.out), extra={"widths": arch.widths, "activation": activation.value})
    return EXIT_OK


def run_verify(args, config, logger) -> int:
    report = VerificationService(config, seed=args.seed).run_verify(args.suite)
    path = write_json(report, Path(args.out) / f"verify_{args.suite}.json")
    print(json.dumps(report, indent=2, sort_keys=True))
    logger.info(f"Verify report written to {path}")
    return EXIT_OK if report["passed"] or args.allow_partial else EXIT_FAILURE


def _add_dataset_arguments(parser: argparse.ArgumentParser, n_default: Optional[int] = 1024, d0_default: int = 1) -> None:
    parser.add_argument("--preset", default="d1", help="Dataset profile from the configuration (default: d1)")
    parser.add_argument("--n", type=int, default=n_default, help=f"Number of samples N (default: {n_default})")
    parser.add_argument("--d0", type=int, default=d0_default, help=f"Input dimension (default: {d0_default})")
    parser.add_argument("--class-sizes", help="Comma-separated class sizes overriding the profile split")
    parser.add_argument("--dataset", help="Load a saved dataset (path stem) instead of generating one")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Kernel NC1 toolkit - variability collapse of NNGP, NTK, EoS and FCN features",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py gen --preset d1 --n 128 --d0 2
  python main.py gram --kind nngp-erf --n 128 --d0 2 --plot
  python main.py nc1 --kind nngp-relu --n 1024 --d0 1
  python main.py sweep --config my_sweep.yaml --threads 4
  python main.py eos --n 256 --d0 2 --target-d1 2000
  python main.py train-fcn --activation erf --n 1024 --d0 1
  python main.py verify theorem2
        """,
    )
    parser.add_argument("--config", type=Path, help="YAML file layered over config/config.yaml")
    parser.add_argument("--seed", type=int, default=0, help="Seed (master seed for sweeps; default: 0)")
    parser.add_argument("--out", default="output", help="Output directory (default: output)")
    parser.add_argument("--threads", type=int, help="Worker processes for sweeps")
    parser.add_argument("--allow-partial", action="store_true", help="Exit 0 even when some records are not ok")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on the console")

    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a dataset and write it as CSV + JSON")
    _add_dataset_arguments(gen)
    gen.add_argument("--name", default="dataset", help="Output file stem (default: dataset)")

    gram = sub.add_parser("gram", help="Assemble a kernel gram")
    _add_dataset_arguments(gram)
    gram.add_argument("--kind", default="nngp-erf", choices=[k.value for k in KernelKind])
    gram.add_argument("--plot", action="store_true", help="Render the gram as a heatmap")

    nc1 = sub.add_parser("nc1", help="NC1 of a kernel gram (relative to the data when available)")
    _add_dataset_arguments(nc1)
    nc1.add_argument("--kind", default="nngp-erf", choices=[k.value for k in KernelKind])
    nc1.add_argument("--gram", help="Load a saved gram (path stem) instead of assembling one")

    sweep = sub.add_parser("sweep", help="(N, d0) sweep over methods and seeds")
    sweep.add_argument("--profile", help="Dataset profile overriding the sweep section")
    sweep.add_argument("--n-grid", help="Comma-separated N values")
    sweep.add_argument("--d0-grid", help="Comma-separated d0 values")
    sweep.add_argument("--seeds", type=int, help="Repetitions per cell")
    sweep.add_argument("--methods", help="Comma-separated methods, e.g. NNGP-Erf,NTK-Erf,EoS")
    sweep.add_argument("--class-sizes", help="Comma-separated class sizes (fixed-N sweeps)")
    sweep.add_argument("--no-plots", action="store_true", help="Skip heatmap rendering")

    eos = sub.add_parser("eos", help="Solve the equations of state under annealing")
    _add_dataset_arguments(eos, n_default=256, d0_default=2)
    eos.add_argument("--target-d1", type=int, help="Target width (default from configuration)")
    eos.add_argument("--sigma-a2", type=float, help="Readout scale (default 1/128)")
    eos.add_argument("--sigma2", type=float, help="Ridge regularization")
    eos.add_argument("--schedule", help="Comma-separated annealing widths overriding the default")
    eos.add_argument("--tolerance", type=float, help="Residual tolerance (max-norm)")

    fcn = sub.add_parser("train-fcn", help="Train a finite-width FCN by full-batch gradient descent")
    _add_dataset_arguments(fcn)
    fcn.add_argument("--activation", default="erf", choices=[a.value for a in Activation])
    fcn.add_argument("--depth", type=int, help="Number of layers L (2..6)")
    fcn.add_argument("--width", type=int, help="Hidden width")
    fcn.add_argument("--train-preset", help="Training preset (default: the activation's)")
    fcn.add_argument("--lr", type=float, help="Learning rate")
    fcn.add_argument("--weight-decay", type=float, help="Ridge coefficient lambda")
    fcn.add_argument("--steps", type=int, help="Gradient steps")

    verify = sub.add_parser("verify", help="Oracle checks of identities and predictors")
    verify.add_argument("suite", choices=list(VerificationService.SUITES) + ["all"])

    return parser


COMMANDS = {
    "gen": run_gen,
    "gram": run_gram,
    "nc1": run_nc1,
    "sweep": run_sweep,
    "eos": run_eos,
    "train-fcn": run_train_fcn,
    "verify": run_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    log_file = Path(args.out) / "logs" / "kernel_nc1.log"
    logger = setup_logger(level=logging.DEBUG if args.verbose else logging.INFO, log_file=log_file)

    try:
        config = load_config(args.config)
        return COMMANDS[args.command](args, config, logger)
    except KernelNc1Error as e:
        logger.error(f"Application error: {e}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
