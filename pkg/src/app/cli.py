"""``ppcurve`` command line.

Exit codes: 0 on success, 1 when a report has a false pass flag, 2 on usage or input errors.
"""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from ppcurve.bootstrap.replicates import bootstrap_replicates, l1_to_plot
from ppcurve.copulas.models import CopulaModel, Product, create_copula
from ppcurve.empirical.data import load_sample_data
from ppcurve.errors import PPCurveError
from ppcurve.experiments.config import DEFAULT_N_LIST, ExperimentConfig
from ppcurve.experiments.equality import run_equality_test
from ppcurve.experiments.reports import SAMPLES_HEADER, ExperimentReport, describe, sample_rows
from ppcurve.experiments.runners import (
    run_bootstrap_validity_experiment,
    run_convergence_experiment,
    run_divergence_diagnostic,
    run_dkw_check,
    run_inequality_check,
    run_limit_simulation,
)
from ppcurve.io import dumps_json, format_float, write_csv, write_json
from ppcurve.margins.models import MarginModel, Uniform, create_margin
from ppcurve.parallel import resolve_threads
from ppcurve.rng import SubstreamFactory

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

type Handler = Callable[[argparse.Namespace, argparse.ArgumentParser], int]


def _argument_type[T](parse: Callable[[str], T]) -> Callable[[str], T]:
    def _convert(raw: str) -> T:
        try:
            return parse(raw)
        except (PPCurveError, ValueError, ZeroDivisionError) as e:
            raise argparse.ArgumentTypeError(str(e))

    _convert.__name__ = parse.__name__
    return _convert


def _parse_n_list(raw: str) -> tuple[int, ...]:
    return tuple(int(it) for it in raw.split(","))


def _parse_fraction(raw: str) -> float:
    return float(Fraction(raw.strip()))


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=0, help="64-bit master seed (default: 0)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: $PPCURVE_THREADS or 1)")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="INFO", type=str.upper)
    parser.add_argument("--out", type=Path, default=None, help="output file")
    return parser


def _model_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--fx", type=_argument_type(create_margin), default=Uniform(), help="margin spec of X")
    parser.add_argument("--gy", type=_argument_type(create_margin), default=Uniform(), help="margin spec of Y")
    parser.add_argument("--copula", type=_argument_type(create_copula), default=Product(), help="copula spec")
    parser.add_argument("--n", type=_argument_type(_parse_n_list), default=DEFAULT_N_LIST, help="comma-separated n")
    ratio = parser.add_mutually_exclusive_group()
    ratio.add_argument("--m", type=int, default=None, help="X sample size for a single --n (two-sample mode)")
    ratio.add_argument("--rho", type=_argument_type(_parse_fraction), default=None, help="two-sample ratio n/(m+n)")
    parser.add_argument("--reps", type=int, default=2000, help="replicates per n")
    parser.add_argument("--boot-b", type=int, default=2000, help="bootstrap replicates")
    parser.add_argument("--grid", type=int, default=512, help="limit grid size J")
    parser.add_argument("--shift", type=_argument_type(_parse_fraction), default=1.0 / 64.0, help="shift h")
    parser.add_argument("--draws", type=int, default=20000, help="limit process draws")
    return parser


def _data_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--in",
        dest="inputs",
        type=Path,
        action="append",
        required=True,
        help="paired x,y CSV, or given twice: X and Y single-column CSVs",
    )
    parser.add_argument("--boot-b", type=int, default=2000, help="bootstrap replicates")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppcurve", description="P-P curve inference in L1")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common, model, data = _common_parser(), _model_parser(), _data_parser()

    subparsers.add_parser("pp-plot", parents=[common, data], help="write the P-P plot of a dataset as CSV")
    subparsers.add_parser("bootstrap", parents=[common, data], help="bootstrap replicates of a dataset's P-P plot")
    subparsers.add_parser("limit-sim", parents=[common, model], help="draw L1 norms of the limit process")
    subparsers.add_parser("mc-convergence", parents=[common, model], help="convergence experiment")
    bootstrap = subparsers.add_parser("mc-bootstrap", parents=[common, model], help="bootstrap validity experiment")
    bootstrap.add_argument(
        "--with-sampling",
        action="store_true",
        help="run the convergence experiment first and report the KS distance to its sampling law",
    )
    subparsers.add_parser("mc-divergence", parents=[common, model], help="shift-modulus divergence diagnostic")
    subparsers.add_parser("dkw", parents=[common, model], help="DKW moment bound check")
    inequality = subparsers.add_parser("inequality", parents=[common, model], help="limit-process inequality check")
    inequality.add_argument("--a", type=float, default=0.25)
    inequality.add_argument("--b", type=float, default=0.75)
    subparsers.add_parser("test-equal", parents=[common, data], help="bootstrap test of F = G")

    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def build_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> ExperimentConfig:
    f_model: MarginModel = args.fx
    g_model: MarginModel = args.gy
    copula: CopulaModel = args.copula
    rho = args.rho

    if args.m is not None:
        if len(args.n) != 1:
            parser.error("argument --m: requires a single --n value, use --rho with several sizes")
        if args.m < 1:
            parser.error(f"argument --m: must be positive, got {args.m}")
        rho = args.n[0] / (args.m + args.n[0])

    return ExperimentConfig(
        f_model=f_model,
        g_model=g_model,
        copula=copula,
        n_list=args.n,
        rho=rho,
        replicates=args.reps,
        bootstrap_b=args.boot_b,
        grid_size=args.grid,
        shift=args.shift,
        limit_draws=args.draws,
        master_seed=args.seed,
        threads=resolve_threads(args.threads),
        output=args.out,
    )


def _log_resolved(args: argparse.Namespace, resolved: dict) -> None:
    resolved = {"command": args.command, "out": str(args.out) if args.out else None, **resolved}
    logger.info("Resolved configuration: %s", dumps_json(resolved).strip())


def _finish_report(report: ExperimentReport, out: Path | None) -> int:
    if out is not None:
        report.write(out)
    flags = " ".join(f"{k}={v}" for k, v in report.flags.items())
    print(f"{report.experiment}: passed={report.passed} {flags}".rstrip() + (f" out={out}" if out else ""))
    return 0 if report.passed else 1


def _experiment_handler(run: Callable[[ExperimentConfig], ExperimentReport]) -> Handler:
    def _handle(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
        config = build_config(args, parser)
        _log_resolved(args, {**config.to_dict(), "threads": config.threads})
        return _finish_report(run(config), args.out)

    return _handle


def _handle_inequality(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = build_config(args, parser)
    _log_resolved(args, {**config.to_dict(), "threads": config.threads, "a": args.a, "b": args.b})
    return _finish_report(run_inequality_check(config, args.a, args.b), args.out)


def _handle_pp_plot(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    _log_resolved(args, {"inputs": [str(it) for it in args.inputs]})
    if args.out is None:
        parser.error("argument --out: required for pp-plot")

    data = load_sample_data(args.inputs)
    plot = data.pp_plot()
    rows = [(0.0, float(plot.values[0]))]
    rows.extend((float(u), float(v)) for u, v in zip(plot.breakpoints, plot.values))
    write_csv(args.out, ("u", "value"), rows)

    print(f"pp-plot: mode={data.mode} m={data.m} n={data.n} rows={len(rows)} out={args.out}")
    return 0


def _handle_mc_bootstrap(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = build_config(args, parser)
    _log_resolved(args, {**config.to_dict(), "threads": config.threads, "with_sampling": args.with_sampling})
    sampling = run_convergence_experiment(config) if args.with_sampling else None
    return _finish_report(run_bootstrap_validity_experiment(config, sampling=sampling), args.out)


def _handle_bootstrap(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    threads = resolve_threads(args.threads)
    _log_resolved(args, {"inputs": [str(it) for it in args.inputs], "boot_b": args.boot_b, "seed": args.seed})

    data = load_sample_data(args.inputs)
    values = bootstrap_replicates(
        data, args.boot_b, l1_to_plot, SubstreamFactory(args.seed, "bootstrap-data"), threads=threads
    )
    if args.out is not None:
        write_csv(args.out, SAMPLES_HEADER, sample_rows(data.n, values))

    summary = describe(values)
    print(
        f"bootstrap: n={data.n} B={args.boot_b} mean={format_float(summary['mean'])} "
        f"p99={format_float(summary['p99'])}" + (f" out={args.out}" if args.out else "")
    )
    return 0


def _handle_test_equal(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    threads = resolve_threads(args.threads)
    _log_resolved(args, {"inputs": [str(it) for it in args.inputs], "boot_b": args.boot_b, "seed": args.seed})

    data = load_sample_data(args.inputs)
    result = run_equality_test(data, args.boot_b, args.seed, threads=threads)
    if args.out is not None:
        write_json(args.out, {"seed": args.seed, **result._asdict()})

    print(f"p={format_float(result.p_value)} T={format_float(result.statistic)} n={result.n} B={result.replicates}")
    return 0


_HANDLERS_MAP: dict[str, Handler] = {
    "pp-plot": _handle_pp_plot,
    "bootstrap": _handle_bootstrap,
    "limit-sim": _experiment_handler(run_limit_simulation),
    "mc-convergence": _experiment_handler(run_convergence_experiment),
    "mc-bootstrap": _handle_mc_bootstrap,
    "mc-divergence": _experiment_handler(run_divergence_diagnostic),
    "dkw": _experiment_handler(run_dkw_check),
    "inequality": _handle_inequality,
    "test-equal": _handle_test_equal,
}


def parse_and_dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args.log_level)
        return _HANDLERS_MAP[args.command](args, parser)
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 2
    except PPCurveError as e:
        print(f"ppcurve: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"ppcurve: error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
