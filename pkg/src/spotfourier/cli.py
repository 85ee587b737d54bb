"""Command-line entry points.

Subcommands: simulate, estimate, sweep, jumps-demo, inversion-check.
Every invocation is deterministic given its flags: seeds are explicit,
no wall-clock values enter any output, and CSV/SVG emission is
byte-reproducible.  Exit code 0 only on full success; argument errors
exit 2 (argparse), runtime failures exit 1 with a message on stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .estimator import (
    EstimatorConfig,
    default_degree,
    default_harmonics,
    estimate_jump_squares,
    estimate_spot_path,
    write_spot_estimate_csv,
)
from .fourier import write_coefficients_csv
from .market_sim import (
    ConstantVol,
    JumpModelCPP,
    PartitionSpec,
    SinusoidalShiftVol,
    read_jump_record_csv,
    simulate_path,
    subsample,
    write_jump_record_csv,
    write_path_csv,
)
from .ticks import TickSeries, ingest_csv, write_ticks_csv


def _parse_model(text: str):
    kind, _, param = text.partition(":")
    if kind == "constant":
        return ConstantVol(float(param) if param else 1.0)
    if kind == "sinshift":
        return SinusoidalShiftVol(float(param) if param else 1.0)
    raise argparse.ArgumentTypeError(
        f"unknown model {text!r}; expected constant:c or sinshift:s0"
    )


def _parse_jumps(text: str) -> JumpModelCPP:
    fields = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(
                f"bad jump spec item {item!r}; expected key=value"
            )
        fields[key.strip()] = value.strip()
    known = {"lambda", "marks", "compensate"}
    unknown = set(fields) - known
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown jump spec keys {sorted(unknown)}; known: {sorted(known)}"
        )
    if "lambda" not in fields:
        raise argparse.ArgumentTypeError("jump spec requires lambda=<intensity>")
    try:
        return JumpModelCPP(
            intensity=float(fields["lambda"]),
            marks=fields.get("marks", "unit"),
            compensate=fields.get("compensate", "true").lower() != "false",
        )
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_int_list(text: str) -> tuple:
    try:
        values = tuple(int(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("integer list must be nonempty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spotfourier",
        description="Fourier estimation of spot volatility and squared jumps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a log-price path and export it")
    sim.add_argument("--model", type=_parse_model, default="constant:1.0",
                     help="constant:c or sinshift:s0 (default constant:1.0)")
    sim.add_argument("--jumps", type=_parse_jumps, default=None,
                     help="e.g. lambda=2,marks=unit[,compensate=false]")
    sim.add_argument("--grid-points", type=int, default=10_000,
                     help="number of grid cells on [-pi, pi]")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="path CSV (t,H,J,P,V)")
    sim.add_argument("--jumps-out", default=None, help="jump record CSV (tau,delta_j)")
    sim.add_argument("--ticks-out", default=None,
                     help="tick CSV (t,logprice) consumable by `estimate`")

    est = sub.add_parser("estimate", help="estimate spot variance from tick data")
    est.add_argument("--input", required=True, help="tick CSV (t,logprice)")
    est.add_argument("--no-header", action="store_true",
                     help="input file has no header row")
    est.add_argument("--harmonics", type=int, default=None,
                     help="Bohr cutoff N (default min(m//2, 4096))")
    est.add_argument("--degree", type=int, default=None,
                     help="Fejer degree M (default floor(N**0.4))")
    est.add_argument("--rescale-jumps", action="store_true",
                     help="recover squared jumps instead of spot variance")
    est.add_argument("--eval-points", type=int, default=629,
                     help="size of the uniform evaluation grid")
    est.add_argument("--out", required=True, help="estimate CSV (t,value)")
    est.add_argument("--coeffs-out", default=None,
                     help="optional CSV of estimated coefficients (q,re,im)")

    swp = sub.add_parser("sweep", help="run a coefficient-error convergence sweep")
    swp.add_argument("--config", required=True, help="JSON sweep configuration")
    swp.add_argument("--out-dir", required=True)
    swp.add_argument("--plots", action="store_true", help="emit SVG plots")

    demo = sub.add_parser("jumps-demo",
                          help="squared-jump recovery benchmark (degrees 10/50/100/700)")
    demo.add_argument("--out-dir", required=True)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--grid-points", type=int, default=100_000)
    demo.add_argument("--degrees", type=_parse_int_list, default=(10, 50, 100, 700))
    demo.add_argument("--harmonics", type=int, default=None,
                      help="Bohr cutoff (default: Nyquist band, grid points // 2)")
    demo.add_argument("--plots", action="store_true", help="emit SVG plots")

    inv = sub.add_parser("inversion-check",
                         help="verify the deterministic Fejer inversion bound")
    inv.add_argument("--jumps", required=True, help="jump record CSV (tau,delta_j)")
    inv.add_argument("--n-list", type=_parse_int_list, required=True,
                     help="comma-separated Fejer degrees, e.g. 8,16,1024")
    inv.add_argument("--t-points", type=int, default=64,
                     help="size of the uniform t grid")
    inv.add_argument("--out", required=True, help="results CSV")
    return parser


def _cmd_simulate(args) -> int:
    grid = PartitionSpec.regular(args.grid_points)
    path = simulate_path(args.model, grid, args.seed, args.jumps)
    write_path_csv(path, args.out)
    print(f"path written to {args.out} ({grid.cells} cells, seed {args.seed})")
    if args.jumps_out is not None:
        write_jump_record_csv(path.jump_record, args.jumps_out)
        print(f"jump record written to {args.jumps_out} "
              f"({path.jump_record.count} jumps)")
    if args.ticks_out is not None:
        write_ticks_csv(TickSeries(path.times, path.price), args.ticks_out)
        print(f"ticks written to {args.ticks_out}")
    return 0


def _cmd_estimate(args) -> int:
    series = ingest_csv(args.input, has_header=not args.no_header)
    obs = series.to_observed_increments()
    harmonics = args.harmonics if args.harmonics is not None else default_harmonics(obs.count)
    degree = args.degree if args.degree is not None else default_degree(harmonics)
    if degree > harmonics:
        raise ValueError(
            f"degree M={degree} exceeds harmonics N={harmonics}; the Fejer "
            f"polynomial needs coefficients up to M, so pass --degree <= "
            f"{harmonics} or raise --harmonics to at least {degree}"
        )
    if args.eval_points < 2:
        raise ValueError(f"--eval-points must be >= 2, got {args.eval_points}")
    eval_grid = np.linspace(-np.pi, np.pi, args.eval_points)
    config = EstimatorConfig(harmonics, degree, rescale_jumps=args.rescale_jumps,
                             eval_grid=eval_grid)
    if args.rescale_jumps:
        estimate = estimate_jump_squares(obs, config)
    else:
        estimate = estimate_spot_path(obs, config)
    write_spot_estimate_csv(estimate, args.out)
    if args.coeffs_out is not None:
        from .estimator import estimate_coefficients

        table = estimate_coefficients(obs, harmonics, degree)
        write_coefficients_csv(table, args.coeffs_out)
        print(f"coefficients written to {args.coeffs_out}")
    t0, t_end = series.span
    print(f"observations: {obs.count}")
    print(f"harmonics: {harmonics}")
    print(f"degree: {degree}")
    print(f"kind: {estimate.kind}")
    print(f"original window: [{t0!r}, {t_end!r}]")
    print(f"volatility rescale factor (divide values by this for the original "
          f"clock): {series.volatility_rescale_factor!r}")
    print(f"estimate written to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    config = experiments.load_sweep_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = experiments.coefficient_error_sweep(config)
    experiments.write_sweep_csv(result, out_dir / "errors.csv")
    events = experiments.error_event_frequency(config, result=result)
    experiments.write_event_frequency_csv(events, out_dir / "event_frequency.csv")
    print(f"sweep results written to {out_dir / 'errors.csv'}")
    if len(config.n_values) >= 4:
        fit = experiments.rate_regression(result.n_values, result.mean_errors)
        experiments.write_rate_fit_csv(fit, out_dir / "rate_fit.csv")
        print(f"fitted log-log slope {fit.slope!r} (r_squared {fit.r_squared!r})")
    else:
        print("fewer than 4 cutoffs: skipping the rate fit")
    if args.plots:
        experiments.plot_error_vs_n(result, out_dir / "error_vs_n.svg")
        print(f"plot written to {out_dir / 'error_vs_n.svg'}")
    return 0


def _cmd_jumps_demo(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = experiments.jump_recovery_experiment(
        args.degrees, args.seed, grid_cells=args.grid_points,
        harmonics=args.harmonics,
    )
    for degree in sorted(result.estimates):
        dest = out_dir / f"estimate_m{degree}.csv"
        write_spot_estimate_csv(result.estimates[degree], dest)
        print(f"degree {degree}: estimate written to {dest}")
    write_jump_record_csv(result.jump_record, out_dir / "jumps.csv")
    experiments.write_jump_summary_csv(result, out_dir / "summary.csv")
    print(f"{result.jump_record.count} jumps; harmonics {result.harmonics}; "
          f"summary written to {out_dir / 'summary.csv'}")
    if args.plots:
        experiments.plot_estimates(
            result.estimates, out_dir / "estimates.svg", result.jump_record
        )
        print(f"plot written to {out_dir / 'estimates.svg'}")
    return 0


def _cmd_inversion_check(args) -> int:
    record = read_jump_record_csv(args.jumps)
    if args.t_points < 2:
        raise ValueError(f"--t-points must be >= 2, got {args.t_points}")
    t_values = np.linspace(-np.pi, np.pi, args.t_points)
    result = experiments.inversion_bound_sweep([record], args.n_list, t_values)
    experiments.write_inversion_sweep_csv(result, args.out)
    failures = sum(1 for row in result.rows if not row[5])
    print(f"checked {len(result.rows)} (order, t) pairs, {failures} bound violations; "
          f"results written to {args.out}")
    if failures:
        print("inversion bound violated", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "jumps-demo": _cmd_jumps_demo,
    "inversion-check": _cmd_inversion_check,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
