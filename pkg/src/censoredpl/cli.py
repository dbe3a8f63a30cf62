"""Command-line front end: simulate, fit, experiment, and plot.

Exit codes: 0 success, 2 bad input or configuration, 3 a requested fit
ran but did not converge. All randomness flows from an explicit --seed;
when the flag is omitted a fixed default keeps runs reproducible rather
than drawing entropy.
"""

import argparse
import dataclasses
import json
import sys

from . import __version__
from .avar import estimate_standard_errors
from .dataio import (
    emit_plot_data,
    file_digest,
    read_dataset,
    result_document,
    result_text,
    write_dataset,
    write_result,
)
from .exceptions import (
    CensoredPathlossError,
    MissingMetadataError,
    SingularInformationError,
    SpecError,
)
from .model import (
    PathlossParams,
    apply_censoring,
    fspl_reference,
    generate_synthetic,
)
from .montecarlo import ExperimentSpec, make_distances, run_experiment
from .ols import ols_fit
from .tobit import FitOptions, tobit_fit

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3

#: Seed used when --seed is not given; fixed so repeated runs agree.
DEFAULT_SEED = 12345


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CensoredPathlossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="censoredpl",
        description="Fit log-distance pathloss models to noise-floor-censored "
        "measurements by censored maximum likelihood, with an OLS baseline.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser(
        "simulate",
        help="generate censored synthetic measurements",
        description="Draw shadowed pathloss samples on a distance grid, censor "
        "them at the level c, and write a measurement CSV.",
    )
    sim.add_argument("output", help="output CSV path")
    sim.add_argument("--pl-d0", type=float, required=True, help="true pathloss at d0 (dB)")
    sim.add_argument("--n", type=float, required=True, help="true pathloss exponent (unitless)")
    sim.add_argument("--sigma", type=float, required=True, help="true shadowing std (dB)")
    sim.add_argument("--d0", type=float, required=True, help="reference distance (meters)")
    sim.add_argument("--dmin", type=float, required=True, help="smallest distance (meters)")
    sim.add_argument("--dmax", type=float, required=True, help="largest distance (meters)")
    sim.add_argument("--count", type=int, required=True, help="number of samples")
    sim.add_argument(
        "--spacing", choices=("log", "linear"), default="log",
        help="distance grid spacing (default %(default)s)",
    )
    sim.add_argument(
        "--c", type=float, required=True,
        help="censoring level (dB); pass inf to disable censoring",
    )
    sim.add_argument(
        "--frequency", type=float, default=None,
        help="carrier frequency (Hz), stored as file metadata",
    )
    sim.add_argument(
        "--seed", type=int, default=DEFAULT_SEED,
        help="RNG seed (default %(default)s)",
    )
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser(
        "fit",
        help="fit estimators to a measurement file",
        description="Fit the censored-ML and/or OLS pathloss models to a "
        "measurement CSV and write a JSON result.",
    )
    fit.add_argument("input", help="measurement CSV path")
    fit.add_argument("-o", "--output", default=None,
                     help="result JSON path (default: print to stdout)")
    fit.add_argument("--plot-data", default=None, help="also write plot data CSV here")
    fit.add_argument("--svg", default=None,
                     help="also render an SVG plot here (requires --plot-data)")
    _add_fit_flags(fit)
    fit.set_defaults(func=cmd_fit)

    exp = sub.add_parser(
        "experiment",
        help="run a repeated synthetic experiment",
        description="Run a Monte-Carlo experiment described by a JSON spec "
        "file and write the report.",
    )
    exp.add_argument("spec", help="experiment spec JSON path")
    exp.add_argument("-o", "--output", default=None,
                     help="report JSON path (default: print to stdout)")
    exp.set_defaults(func=cmd_experiment)

    plot = sub.add_parser(
        "plot",
        help="fit and emit plot data",
        description="Fit estimators to a measurement CSV and emit plot-ready "
        "data (and optionally a static SVG).",
    )
    plot.add_argument("input", help="measurement CSV path")
    plot.add_argument("-o", "--output", required=True, help="plot data CSV path")
    plot.add_argument("--svg", default=None, help="also render an SVG plot here")
    _add_fit_flags(plot)
    plot.set_defaults(func=cmd_plot)

    return parser


def _add_fit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--estimator", choices=("both", "tobit", "ols"), default="both",
        help="which estimators to run (default %(default)s)",
    )
    parser.add_argument(
        "--censored-mode", choices=("substitute", "drop"), default="substitute",
        help="OLS handling of censored rows (default %(default)s)",
    )
    parser.add_argument(
        "--fix-pl-d0", type=_fixed_pl_d0, default=None, metavar="DB|fspl",
        help="pin the censored-ML intercept to this value (dB), or 'fspl' to "
        "use the free-space reference at the file's frequency (Hz metadata)",
    )
    parser.add_argument("--d0", type=float, default=None,
                        help="override reference distance (meters)")
    parser.add_argument("--c", type=float, default=None,
                        help="override censoring level (dB)")
    parser.add_argument("--frequency", type=float, default=None,
                        help="override carrier frequency (Hz)")
    parser.add_argument("--max-iter", type=int, default=2000,
                        help="simplex iteration budget (default %(default)s)")
    parser.add_argument("--xtol", type=float, default=1e-6,
                        help="simplex size tolerance (default %(default)s)")
    parser.add_argument("--ftol", type=float, default=1e-9,
                        help="objective spread tolerance (default %(default)s)")
    parser.add_argument("--no-restart", action="store_true",
                        help="disable the automatic restart after a failed converge")


def _fixed_pl_d0(text: str):
    if text.lower() == "fspl":
        return "fspl"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a dB value or 'fspl', got {text!r}")


def cmd_simulate(args) -> int:
    if args.count < 1:
        raise SpecError(f"count must be >= 1, got {args.count}")
    if args.dmin < args.d0:
        raise SpecError(f"dmin must be >= d0, got dmin={args.dmin} < d0={args.d0}")
    params = PathlossParams(args.pl_d0, args.n, args.sigma)
    distances = make_distances(args.spacing, args.dmin, args.dmax, args.count)
    values = generate_synthetic(params, distances, args.d0, args.seed)
    dataset = apply_censoring(values, args.c, args.d0, frequency_hz=args.frequency)
    write_dataset(dataset, args.output)
    print(
        f"wrote {args.output}: {len(dataset.samples)} samples, "
        f"censored fraction {dataset.censored_fraction:.3f}"
    )
    return EXIT_OK


def _load_dataset(args):
    return read_dataset(args.input, d0=args.d0, c=args.c, frequency_hz=args.frequency)


def _resolve_fixed_pl_d0(args, dataset):
    if args.fix_pl_d0 is None:
        return None
    if args.fix_pl_d0 == "fspl":
        if dataset.frequency_hz is None:
            raise MissingMetadataError(
                "frequency_hz",
                "--fix-pl-d0 fspl needs the carrier frequency; add "
                "'# frequency_hz = ...' to the file or pass --frequency",
            )
        return fspl_reference(dataset.frequency_hz, dataset.d0)
    return float(args.fix_pl_d0)


def _run_fits(args, dataset):
    """Shared fit/plot engine: returns (ols, tobit, tobit_se, exit_code)."""
    ols = tobit = tobit_se = None
    code = EXIT_OK
    if args.estimator in ("both", "ols"):
        ols = ols_fit(dataset, args.censored_mode)
    if args.estimator in ("both", "tobit"):
        options = FitOptions(
            fixed_pl_d0=_resolve_fixed_pl_d0(args, dataset),
            max_iter=args.max_iter,
            xtol=args.xtol,
            ftol=args.ftol,
            restart=not args.no_restart,
        )
        tobit = tobit_fit(dataset, options)
        if tobit.converged:
            try:
                tobit_se = estimate_standard_errors(tobit, dataset)
            except SingularInformationError as exc:
                print(f"warning: standard errors unavailable: {exc}", file=sys.stderr)
        else:
            code = EXIT_NOT_CONVERGED
    return ols, tobit, tobit_se, code


def _plot_params(ols, tobit) -> dict:
    fits = {}
    if tobit is not None:
        fits["tobit"] = tobit.params
    if ols is not None:
        # The mean curve needs only intercept and slope; a degenerate
        # zero-variance fit still plots.
        fits["ols"] = PathlossParams(ols.pl_d0, ols.n, max(ols.sigma, 1e-300))
    return fits


def cmd_fit(args) -> int:
    if args.svg and not args.plot_data:
        raise SpecError("--svg requires --plot-data")
    dataset = _load_dataset(args)
    ols, tobit, tobit_se, code = _run_fits(args, dataset)
    document = result_document(
        dataset,
        ols=ols,
        tobit=tobit,
        tobit_se=tobit_se,
        source=str(args.input),
        digest=file_digest(args.input),
    )
    summary_stream = _emit_document(document, args.output)
    if args.plot_data:
        emit_plot_data(dataset, _plot_params(ols, tobit), args.plot_data, args.svg)
    if ols is not None:
        print(
            f"ols[{ols.mode.value}]: PL(d0)={ols.pl_d0:.3f} dB, n={ols.n:.4f}, "
            f"sigma^2={ols.sigma_sq_hat:.3f} dB^2",
            file=summary_stream,
        )
    if tobit is not None:
        state = "converged" if tobit.converged else "NOT converged"
        print(
            f"tobit: PL(d0)={tobit.params.pl_d0:.3f} dB, n={tobit.params.n:.4f}, "
            f"sigma={tobit.params.sigma:.4f} dB ({state}, "
            f"{tobit.n_censored}/{tobit.n_censored + tobit.n_uncensored} censored)",
            file=summary_stream,
        )
    return code


def cmd_experiment(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}")
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file is not valid JSON: {exc}")
    if not isinstance(config, dict):
        raise SpecError("spec file must contain a JSON object")

    spec = ExperimentSpec.from_dict(config)
    report = run_experiment(spec)
    document = dataclasses.asdict(report)
    summary_stream = _emit_document(document, args.output)

    for name, summary in report.summaries.items():
        line = f"{name}: "
        if "n" in summary.mean:
            line += f"mean n-hat {summary.mean['n']:.4f} (bias {summary.bias['n']:+.4f})"
        else:
            line += "no successful fits"
        if summary.calibration and "n" in summary.calibration:
            line += f", SE calibration {summary.calibration['n']:.3f}"
        if summary.n_failures:
            line += f", {summary.n_failures} failed replicates"
        print(line, file=summary_stream)
    return EXIT_OK


def cmd_plot(args) -> int:
    dataset = _load_dataset(args)
    ols, tobit, tobit_se, code = _run_fits(args, dataset)
    emit_plot_data(dataset, _plot_params(ols, tobit), args.output, args.svg)
    print(f"wrote {args.output}" + (f" and {args.svg}" if args.svg else ""))
    return code


def _emit_document(document: dict, output):
    """Write JSON to ``output`` or stdout; return the stream for summaries."""
    if output:
        write_result(document, output)
        return sys.stdout
    sys.stdout.write(result_text(document))
    return sys.stderr


if __name__ == "__main__":
    sys.exit(main())
