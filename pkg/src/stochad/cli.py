"""Command line entry point: ``stochad {delta,table,sweep,density}``.

Defaults can be overridden with ``STOCHAD_PATHS``, ``STOCHAD_REPEATS``,
``STOCHAD_SEED`` and ``STOCHAD_WORKERS``. CSV goes to ``--out`` (or to
standard output); a short text table is printed alongside.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import bench
from .estimators import EstimatorKind, ShiftConvention, WidthUnit, estimate_delta
from .model_bs import BlackScholesParams, DigitalOption

FULL_SCALE_REPEATS = 10_000


def _env_int(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


def _widths(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid width list {text!r}") from None
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("widths must be positive")
    return values


def _add_model_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("model")
    g.add_argument("--s0", type=float, default=1.0)
    g.add_argument("--rate", type=float, default=0.05)
    g.add_argument("--sigma", type=float, default=0.5)
    g.add_argument("--maturity", type=float, default=1.0)
    g.add_argument("--strike", type=float, default=1.05)
    g.add_argument("--paths", type=int, default=_env_int("STOCHAD_PATHS", 200_000))
    g.add_argument("--seed", type=int, default=_env_int("STOCHAD_SEED", 0),
                   help="seed (base seed for repeated experiments)")


def _add_width_args(p: argparse.ArgumentParser, single_width=True):
    g = p.add_argument_group("estimators")
    if single_width:
        g.add_argument("--w", type=float, default=0.05, help="localization width")
    g.add_argument("--wphi", type=float, default=0.5, help="density regression width (stddev units)")
    g.add_argument("--m", type=int, default=2, help="density regression order")
    g.add_argument("--regression", choices=("distribution", "density"), default="distribution")
    g.add_argument("--width-unit", choices=[u.value for u in WidthUnit], default=WidthUnit.STDDEV.value,
                   help="unit of --w: standard deviations of X (default) or absolute")
    g.add_argument("--fd-shift-convention", choices=[c.value for c in ShiftConvention],
                   default=ShiftConvention.HALF.value,
                   help="finite difference at S0 +- w/2 (half) or S0 +- w (full)")


def _add_repeat_args(p: argparse.ArgumentParser):
    p.add_argument("--repeats", type=int, default=_env_int("STOCHAD_REPEATS", 1000))
    p.add_argument("--full-scale", action="store_true", help=f"use {FULL_SCALE_REPEATS} repeats")
    p.add_argument("--workers", type=int, default=bench.default_workers())
    p.add_argument("--out", help="CSV output file (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochad", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delta", help="single delta estimate")
    p.add_argument("--estimator", choices=[k.value for k in EstimatorKind], default="regression")
    _add_model_args(p)
    _add_width_args(p)
    p.add_argument("--out")

    p = sub.add_parser("table", help="repeated experiment, one row per estimator")
    _add_model_args(p)
    _add_width_args(p)
    _add_repeat_args(p)

    p = sub.add_parser("sweep", help="per-seed deltas over several widths")
    p.add_argument("--widths", type=_widths, default=[0.5, 0.05, 0.025])
    _add_model_args(p)
    _add_width_args(p, single_width=False)
    _add_repeat_args(p)

    p = sub.add_parser("density", help="density regression scatter and fit")
    _add_model_args(p)
    p.add_argument("--wphi", type=float, default=0.5)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--kind", choices=("density", "distribution"), default="density")
    p.add_argument("--out")
    return parser


def _model(args) -> tuple[BlackScholesParams, DigitalOption]:
    return (BlackScholesParams(args.s0, args.rate, args.sigma, args.maturity),
            DigitalOption(args.strike, args.maturity))


def _config(args, w: float | None = None) -> bench.ExperimentConfig:
    params, option = _model(args)
    return bench.ExperimentConfig(
        params=params, option=option, n=args.paths,
        repeats=FULL_SCALE_REPEATS if getattr(args, "full_scale", False) else getattr(args, "repeats", 1),
        base_seed=args.seed, w=args.w if w is None else w, w_phi=args.wphi, m=args.m,
        regression=args.regression, width_unit=WidthUnit(args.width_unit),
        shift_convention=ShiftConvention(args.fd_shift_convention),
        workers=max(1, getattr(args, "workers", 1)))


def _emit(csv_text: str, out: str | None, summary: str | None = None):
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(csv_text)
        if summary:
            print(summary)
    else:
        sys.stdout.write(csv_text)
        if summary:
            print(summary, file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "delta":
        config = _config(args)
        spec = next(s for s in config.estimators() if s.kind.value == args.estimator)
        value = estimate_delta(spec, config.params, config.option, config.n, config.base_seed)
        _emit(f"estimator,seed,delta\n{spec.kind.value},{config.base_seed},{value:.6f}\n", args.out,
              f"{spec.label}: {value:.6f}")
    elif args.command == "table":
        stats = bench.run_experiment(_config(args))
        _emit(bench.table_csv(stats), args.out, bench.table_text(stats))
    elif args.command == "sweep":
        config = _config(args, w=args.widths[0])
        _emit(bench.width_sweep(config, args.widths), args.out,
              f"{len(args.widths)} widths x {config.repeats} seeds")
    elif args.command == "density":
        params, option = _model(args)
        diag = bench.emit_density_diagnostics(params, option, args.paths, args.seed,
                                              args.wphi, args.m, args.kind)
        _emit(diag.to_csv(), args.out,
              f"{args.kind} regression: {len(diag.samples)} samples, d*(0) = {diag.estimate:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
