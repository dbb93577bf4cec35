"""
Command line entry point: `balancedgl {gen,learn,bench,denoise}`.

Exit codes: 0 on success, 2 for usage and input errors, 3 when the
algorithm itself fails (for instance a node with no feasible polarity).
"""
import argparse
import dataclasses
import logging
import os
import sys
import time
import typing

import numpy as np

from balancedgl import __version__
from balancedgl.concurrency import map_in_processes
from balancedgl.config import Config, LogLevel, load_settings
from balancedgl.convertors import CONVERTOR_TYPES
from balancedgl.datastructures import (
    INIT_MODES,
    LearnConfig,
    PocsConfig,
    RhoSchedule,
    SynthSpec,
)
from balancedgl.exceptions import BalancedGLError, BothInfeasible
from balancedgl.filters import denoise_signals
from balancedgl.formats import (
    dump_balanced,
    load_covariance,
    load_graph,
    read_matrix_csv,
    write_json,
    write_manifest,
    write_matrix_csv,
    write_records,
    write_table_csv,
)
from balancedgl.graphs import graph_summary
from balancedgl.learning import BalancedGraphLearner, clime_greedy, sample_covariance
from balancedgl.metrics import f_measure, mse, relative_error, rmse
from balancedgl.synth import (
    add_awgn,
    gen_balanced_er_graph,
    prepare_timeseries,
    sample_gmrf,
    trial_seeds,
)

logger = logging.getLogger("balancedgl")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILURE = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

positive_float = CONVERTOR_TYPES["positive_float"]
positive_int = CONVERTOR_TYPES["positive_int"]
non_negative_int = CONVERTOR_TYPES["int"]
probability = CONVERTOR_TYPES["probability"]
fraction = CONVERTOR_TYPES["fraction"]
real = CONVERTOR_TYPES["float"]


class CommandError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_USAGE) -> None:
        self.exit_code = exit_code
        super().__init__(message)


def _add_synth_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("synthetic graph")
    group.add_argument("--n", type=positive_int, default=50, help="Number of nodes.")
    group.add_argument("--p", type=probability, default=0.2, help="Edge probability.")
    group.add_argument("--k", type=non_negative_int, default=500, help="Number of samples.")
    group.add_argument("--weight-lo", type=positive_float, default=0.01)
    group.add_argument("--weight-hi", type=positive_float, default=1.0)
    group.add_argument("--selfloop-factor", type=positive_float, default=2.5)
    group.add_argument("--selfloop-offset", type=real, default=0.0)


def _add_learn_arguments(parser: argparse.ArgumentParser) -> None:
    defaults = LearnConfig()
    group = parser.add_argument_group("learning")
    group.add_argument("--rho-init", type=positive_float, default=defaults.rho_schedule.rho_init)
    group.add_argument("--growth", type=positive_float, default=defaults.rho_schedule.growth)
    group.add_argument("--rho-max", type=positive_float, default=defaults.rho_schedule.rho_max)
    group.add_argument("--max-cycles", type=positive_int, default=defaults.pocs.max_cycles)
    group.add_argument(
        "--stagnation-tol", type=positive_float, default=defaults.pocs.stagnation_tol
    )
    group.add_argument(
        "--violation-tol", type=positive_float, default=defaults.pocs.violation_tol
    )
    group.add_argument("--max-sweeps", type=positive_int, default=defaults.max_sweeps)
    group.add_argument("--conv-tol", type=positive_float, default=defaults.conv_tol)
    group.add_argument("--init-mode", choices=INIT_MODES, default=defaults.init_mode)
    group.add_argument(
        "--sequential",
        action="store_true",
        help="Test the two polarities of a node one after the other.",
    )


def _learn_config(args: argparse.Namespace, seed: typing.Optional[int] = None) -> LearnConfig:
    try:
        return LearnConfig(
            rho_schedule=RhoSchedule(args.rho_init, args.growth, args.rho_max),
            pocs=PocsConfig(args.max_cycles, args.stagnation_tol, args.violation_tol),
            max_sweeps=args.max_sweeps,
            conv_tol=args.conv_tol,
            seed=args.seed if seed is None else seed,
            init_mode=args.init_mode,
            concurrent=not args.sequential,
        )
    except ValueError as exc:
        raise CommandError(str(exc))


def _synth_spec(args: argparse.Namespace, seed: int) -> SynthSpec:
    try:
        return SynthSpec(
            n=args.n,
            p=args.p,
            weight_range=(args.weight_lo, args.weight_hi),
            selfloop_factor=args.selfloop_factor,
            seed=seed,
            selfloop_offset=args.selfloop_offset,
        )
    except ValueError as exc:
        raise CommandError(str(exc))


def _output_directory(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _options(args: argparse.Namespace) -> typing.Dict[str, typing.Any]:
    return {key: value for key, value in sorted(vars(args).items()) if key != "handler"}


def cmd_gen(args: argparse.Namespace) -> int:
    out = _output_directory(args.out)
    graph_seed, sample_seed, _ = trial_seeds(args.seed, 1)[0]
    truth = gen_balanced_er_graph(_synth_spec(args, graph_seed))
    X = sample_gmrf(truth.laplacian, args.k, seed=sample_seed)
    logger.info("Generated %s with %d samples", graph_summary(truth), args.k)

    dump_balanced(os.path.join(out, "graph.json"), truth)
    write_matrix_csv(os.path.join(out, "data.csv"), X)
    write_manifest(out, "gen", _options(args))
    return EXIT_OK


def cmd_learn(args: argparse.Namespace) -> int:
    out = _output_directory(args.out)
    if args.covariance is not None:
        C = load_covariance(args.covariance)
    elif args.timeseries is not None:
        series = prepare_timeseries(
            read_matrix_csv(args.timeseries),
            moving_average=args.moving_average,
            normalize=not args.no_normalize,
        )
        C = sample_covariance(series)
    else:
        C = sample_covariance(read_matrix_csv(args.data))
    logger.info("Covariance ready: n=%d", C.n)

    if args.baseline == "clime-greed":
        balanced = clime_greedy(C, args.rho, seed=args.seed)
        lambda_min = float(np.linalg.eigvalsh(balanced.L)[0])
        extra = {
            "method": "clime-greed",
            "rho": [args.rho] * C.n,
            "sweeps": 0,
            "lambda_min": lambda_min,
            "warnings": [],
        }  # type: typing.Dict[str, typing.Any]
    else:
        try:
            result = BalancedGraphLearner(_learn_config(args)).fit(C)
        except BothInfeasible as exc:
            raise CommandError(f"node {exc.node}: {exc}", EXIT_FAILURE)
        balanced = result.balanced
        extra = {
            "method": "proposed",
            "rho": result.rhos.tolist(),
            "objectives": result.objectives.tolist(),
            "sweeps": result.sweeps,
            "converged": result.converged,
            "lambda_min": result.lambda_min,
            "warnings": list(result.warnings),
        }
    logger.info("Learned %s", graph_summary(balanced))

    dump_balanced(os.path.join(out, "graph.json"), balanced, **extra)
    write_manifest(out, "learn", _options(args))
    return EXIT_OK


class TrialTask(typing.NamedTuple):
    index: int
    seeds: typing.Tuple[int, int, int]
    spec: SynthSpec
    k: int
    config: LearnConfig
    baseline_rho: typing.Optional[float]
    timing: bool


def run_trial(task: TrialTask) -> typing.List[typing.Dict[str, typing.Any]]:
    """
    One synthetic trial: draw a ground truth, sample it, then learn it with the
    proposed method and with the CLIME-Greed baseline.
    """
    graph_seed, sample_seed, learner_seed = task.seeds
    truth = gen_balanced_er_graph(dataclasses.replace(task.spec, seed=graph_seed))
    X = sample_gmrf(truth.laplacian, task.k, seed=sample_seed)
    C = sample_covariance(X)

    started = time.perf_counter()
    result = BalancedGraphLearner(dataclasses.replace(task.config, seed=learner_seed)).fit(C)
    proposed_ms = (time.perf_counter() - started) * 1000.0

    # Unless given, the baseline runs at the median rho of the learner.
    rho = task.baseline_rho or float(np.median(result.rhos))
    started = time.perf_counter()
    baseline = clime_greedy(C, rho, seed=learner_seed)
    baseline_ms = (time.perf_counter() - started) * 1000.0

    records = []
    for method, estimate, sweeps, elapsed in (
        ("proposed", result.balanced, result.sweeps, proposed_ms),
        ("clime-greed", baseline, 0, baseline_ms),
    ):
        records.append(
            {
                "trial": task.index,
                "seed": graph_seed,
                "method": method,
                "fm": f_measure(estimate.L, truth.L),
                "re": relative_error(estimate.L, truth.L),
                "sweeps": sweeps,
                "runtime_ms": round(elapsed, 3) if task.timing else None,
            }
        )
    logger.info(
        "Trial %d: proposed FM=%.4f RE=%.4f, clime-greed FM=%.4f RE=%.4f",
        task.index,
        records[0]["fm"],
        records[0]["re"],
        records[1]["fm"],
        records[1]["re"],
    )
    return records


def aggregate(
    records: typing.Sequence[typing.Mapping[str, typing.Any]]
) -> typing.List[typing.Dict[str, typing.Any]]:
    rows = []
    for method in ("proposed", "clime-greed"):
        selected = [record for record in records if record["method"] == method]
        if not selected:
            continue
        fm = np.array([record["fm"] for record in selected])
        re = np.array([record["re"] for record in selected])
        rows.append(
            {
                "method": method,
                "trials": len(selected),
                "fm_mean": float(fm.mean()),
                "fm_std": float(fm.std()),
                "re_mean": float(re.mean()),
                "re_std": float(re.std()),
            }
        )
    return rows


def cmd_bench(args: argparse.Namespace) -> int:
    out = _output_directory(args.out)
    config = _learn_config(args)
    spec = _synth_spec(args, args.seed)
    if args.k <= args.n:
        raise CommandError(
            f"--k must exceed --n for covariance estimation (k={args.k}, n={args.n})."
        )
    tasks = [
        TrialTask(
            index=index,
            seeds=seeds,
            spec=spec,
            k=args.k,
            config=config,
            baseline_rho=args.baseline_rho,
            timing=not args.no_timing,
        )
        for index, seeds in enumerate(trial_seeds(args.seed, args.trials))
    ]
    jobs = args.jobs or load_settings(Config(".env")).jobs
    logger.info("Running %d trial(s) with %d job(s)", len(tasks), jobs)
    records = [record for trial in map_in_processes(run_trial, tasks, jobs) for record in trial]

    rows = aggregate(records)
    write_records(os.path.join(out, "trials.jsonl"), records)
    write_json(os.path.join(out, "aggregate.json"), {"methods": rows})
    write_table_csv(os.path.join(out, "aggregate.csv"), rows)
    write_manifest(out, "bench", _options(args))
    for row in rows:
        print(
            f"{row['method']:<12} FM {row['fm_mean']:.4f} ± {row['fm_std']:.4f}   "
            f"RE {row['re_mean']:.4f} ± {row['re_std']:.4f}"
        )
    return EXIT_OK


def cmd_denoise(args: argparse.Namespace) -> int:
    out = _output_directory(args.out)
    document = load_graph(args.graph)
    if document.beta is None:
        raise CommandError(f"{args.graph} carries no polarity vector.")
    balanced = document.balanced()
    signals = read_matrix_csv(args.signals)

    if signals.shape[0] != balanced.n:
        raise CommandError(
            f"{args.signals} has {signals.shape[0]} rows, the graph has {balanced.n} nodes."
        )
    reference = None
    if args.clean is not None:
        reference = read_matrix_csv(args.clean)
        if reference.shape != signals.shape:
            raise CommandError("Clean and noisy signal files have different shapes.")
    if args.sigma is not None:
        if reference is None:
            reference = signals
        signals = add_awgn(signals, args.sigma, seed=args.noise_seed)

    denoised = denoise_signals(balanced, signals, args.cutoff)
    if args.sigma is not None:
        write_matrix_csv(os.path.join(out, "noisy.csv"), signals, column_prefix="signal")
    write_matrix_csv(os.path.join(out, "denoised.csv"), denoised, column_prefix="signal")

    if reference is not None:
        columns = range(signals.shape[1])
        input_mse = [mse(signals[:, k], reference[:, k]) for k in columns]
        output_mse = [mse(denoised[:, k], reference[:, k]) for k in columns]
        write_json(
            os.path.join(out, "metrics.json"),
            {
                "input_mse": input_mse,
                "output_mse": output_mse,
                "mean_input_mse": float(np.mean(input_mse)),
                "mean_output_mse": float(np.mean(output_mse)),
                "input_rmse": rmse(signals, reference),
                "output_rmse": rmse(denoised, reference),
            },
        )
        logger.info(
            "Mean MSE %.4g -> %.4g", float(np.mean(input_mse)), float(np.mean(output_mse))
        )
    write_manifest(out, "denoise", _options(args))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="balancedgl",
        description="Learn balanced signed graph Laplacians from data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", type=LogLevel, default=None, help="Overrides BGL_LOG."
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    gen = commands.add_parser("gen", help="Generate a balanced graph and GMRF samples.")
    _add_synth_arguments(gen)
    gen.add_argument("--seed", type=non_negative_int, default=0)
    gen.add_argument("--out", default=".")
    gen.set_defaults(handler=cmd_gen)

    learn = commands.add_parser("learn", help="Learn a balanced graph from data.")
    source = learn.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", help="Data CSV, variables as rows.")
    source.add_argument("--covariance", help="Covariance JSON.")
    source.add_argument("--timeseries", help="Time-series CSV, stations as rows.")
    learn.add_argument("--moving-average", type=positive_int, default=1)
    learn.add_argument("--no-normalize", action="store_true")
    _add_learn_arguments(learn)
    learn.add_argument("--seed", type=non_negative_int, default=0)
    learn.add_argument("--baseline", choices=("none", "clime-greed"), default="none")
    learn.add_argument(
        "--rho", type=positive_float, default=0.1, help="CLIME rho for the baseline."
    )
    learn.add_argument("--out", default=".")
    learn.set_defaults(handler=cmd_learn)

    bench = commands.add_parser("bench", help="Run the synthetic benchmark.")
    _add_synth_arguments(bench)
    _add_learn_arguments(bench)
    bench.add_argument("--trials", type=positive_int, default=30)
    bench.add_argument("--seed", type=non_negative_int, default=0)
    bench.add_argument("--jobs", type=positive_int, default=None)
    bench.add_argument(
        "--baseline-rho",
        type=positive_float,
        default=None,
        help="CLIME rho for the baseline; defaults to the median learned rho.",
    )
    bench.add_argument(
        "--no-timing",
        action="store_true",
        help="Write null runtimes so that reruns are byte-identical.",
    )
    bench.add_argument("--out", default=".")
    bench.set_defaults(handler=cmd_bench)

    denoise = commands.add_parser("denoise", help="Low-pass filter signals on a learned graph.")
    denoise.add_argument("--graph", required=True)
    denoise.add_argument("--signals", required=True)
    denoise.add_argument("--clean", default=None, help="Clean reference signals.")
    denoise.add_argument("--sigma", type=real, default=None, help="Add white noise first.")
    denoise.add_argument("--noise-seed", type=non_negative_int, default=0)
    denoise.add_argument("--cutoff", type=fraction, default=0.3)
    denoise.add_argument("--out", default=".")
    denoise.set_defaults(handler=cmd_denoise)
    return parser


def configure_logging(level: typing.Optional[LogLevel]) -> None:
    if level is None:
        level = load_settings(Config(".env")).log_level
    logging.basicConfig(level=level.level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: typing.Sequence[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors and 0 for --help and --version.
        return int(exc.code or 0)
    try:
        configure_logging(args.log_level)
        return args.handler(args)
    except CommandError as exc:
        print(f"balancedgl {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, KeyError, ValueError) as exc:
        print(f"balancedgl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BalancedGLError as exc:
        logger.debug("Algorithmic failure", exc_info=True)
        print(f"balancedgl {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
