"""Command-line front end.

Subcommands cover the full workflow: per-unit calibration sweeps, polynomial
fitting, chain validation, the linear theory demo, and offline re-scoring of a
recorded trace. Delimited outputs (CSV/JSON) are written next to rendered PNG
figures of the same stem.

Exit codes: 0 success, 2 input/config error, 3 geometry or model error,
4 numerical failure.
"""

import argparse
import os
import sys

from . import plots, storage
from .calibration import fit_poly
from .config import load_config
from .errors import (
    ConfigError,
    DataFormatError,
    GeometryError,
    LengthMismatch,
    NumericalError,
    ZeroSpan,
)
from .kinematics import tip_error_metrics
from .simulator import (
    estimate_trace,
    generate_sweep,
    run_theory_demo,
    simulate_validation,
    synthesize_dataset,
)


def _sibling(path, suffix):
    base, _ = os.path.splitext(path)
    return base + suffix


def _resolve_out(args, config, default_name):
    if args.out:
        return args.out
    os.makedirs(config.output_dir, exist_ok=True)
    return os.path.join(config.output_dir, default_name)


def _load(args, overrides=None):
    merged = dict(overrides or {})
    if getattr(args, "seed", None) is not None:
        merged["seed"] = args.seed
    return load_config(args.config, merged)


def _print_report(report):
    print("orientation  percent_error  rms_tip_error_deg  max_tip_error_deg")
    for axis in ("pitch", "roll"):
        stats = report.axis(axis)
        pct = "-" if stats.percent_error is None else f"{stats.percent_error:.2f}"
        print(f"{axis:<12} {pct:>13}  {stats.rms_deg:>17.4f}  "
              f"{stats.max_deg:>17.4f}")
    for axis in ("pitch", "roll"):
        rep = report.axis(axis).repeatability_std_deg
        if rep is not None:
            print(f"repeatability std ({axis}): {rep:.4f} deg "
                  f"over {report.cycles} cycles")


def cmd_sweep(args):
    config = _load(args, {"sweep.step_deg": args.step})
    if not (0 <= args.unit < config.chain.n_units):
        raise ConfigError(
            f"unit index {args.unit} outside 0..{config.chain.n_units - 1}"
        )
    unit_geometry = config.chain.units[args.unit]
    if config.sweep.limit_deg > unit_geometry.rotation_limit_deg + 1e-9:
        raise ConfigError(
            f"sweep limit {config.sweep.limit_deg} deg exceeds the "
            f"{unit_geometry.rotation_limit_deg} deg unit rotation limit"
        )
    orientations = generate_sweep(config.sweep)
    dataset = synthesize_dataset(unit_geometry, config.model, orientations,
                                 config.seed, unit_index=args.unit)
    out = _resolve_out(args, config, f"sweep_unit{args.unit}.csv")
    storage.write_dataset_csv(out, [dataset])
    figure = _sibling(out, ".png")
    plots.save_sweep_figure(dataset, figure)
    print(f"wrote {out} ({len(dataset)} samples, "
          f"{dataset.band_violations} band violations)")
    print(f"wrote {figure}")
    return 0


def cmd_calibrate(args):
    config = _load(args)
    datasets = storage.read_dataset_csv(args.data)
    digest = storage.dataset_digest(datasets)
    cals = [fit_poly(dataset) for dataset in datasets]
    out = _resolve_out(args, config, "calibration.json")
    storage.write_calibrations_json(out, cals, digest)
    for cal in cals:
        print(f"unit {cal.unit_index}: fit rms pitch "
              f"{cal.fit_rms_pitch_deg:.4f} deg, roll "
              f"{cal.fit_rms_roll_deg:.4f} deg")
    print(f"wrote {out}")
    return 0


def cmd_validate(args):
    overrides = {
        "validation.axis": args.axis,
        "validation.amplitude_deg": args.amplitude,
        "validation.cycles": args.cycles,
        "validation.samples_per_cycle": args.samples_per_cycle,
    }
    config = _load(args, overrides)
    cals = storage.read_calibrations_json(args.cal)
    if len(cals) != config.chain.n_units:
        raise ConfigError(
            f"{len(cals)} calibrations in {args.cal} for a "
            f"{config.chain.n_units}-unit chain"
        )
    trace = simulate_validation(config.chain, config.model, config.validation,
                                config.seed)
    estimate_trace(trace, cals)
    report = tip_error_metrics(trace.tip_est, trace.tip_truth,
                               config.validation.cycles)
    out = _resolve_out(args, config, "validation_trace.csv")
    storage.write_trace_csv(out, trace)
    report_path = _sibling(out, "_report.json")
    table_path = _sibling(out, "_table.csv")
    figure = _sibling(out, ".png")
    storage.write_report_json(report_path, report)
    storage.write_table_csv(table_path, report)
    plots.save_trace_figure(trace, figure)
    print(f"wrote {out} ({trace.n_samples} samples, "
          f"{trace.band_violations} band violations)")
    print(f"wrote {report_path}")
    print(f"wrote {table_path}")
    print(f"wrote {figure}")
    _print_report(report)
    return 0


def cmd_demo(args):
    config = _load(args)
    result = run_theory_demo(config.unit_geometry, config.model,
                             train_step_deg=args.train_step,
                             samples=args.samples)
    out = _resolve_out(args, config, "demo_fig5.csv")
    storage.write_demo_csv(out, result)
    figure = _sibling(out, ".png")
    plots.save_demo_figure(result, figure)
    print(f"wrote {out}")
    print(f"wrote {figure}")
    for name, r in (("pitch", result.pearson_pitch),
                    ("roll", result.pearson_roll)):
        tag = "undefined (zero variance)" if r is None else f"{r:.4f}"
        print(f"pearson r ({name}): {tag}")
    return 0


def cmd_report(args):
    data = storage.read_trace_csv(args.trace)
    report = tip_error_metrics(data["tip_est"], data["tip_truth"], args.cycles)
    out = args.out or _sibling(args.trace, "_report.json")
    storage.write_report_json(out, report)
    table_path = _sibling(out, "_table.csv")
    storage.write_table_csv(table_path, report)
    figure = _sibling(out, ".png")
    plots.save_report_figure(report, figure)
    print(f"wrote {out}")
    print(f"wrote {table_path}")
    print(f"wrote {figure}")
    _print_report(report)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON config file (defaults used when omitted)")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="override the RNG seed")
    common.add_argument("--out", metavar="PATH",
                        help="primary output file path")

    parser = argparse.ArgumentParser(
        prog="optoshape",
        description="Simulate, calibrate, and score a reflector-based "
                    "orientation sensing chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common],
                       help="synthesize a per-unit calibration sweep CSV")
    p.add_argument("--unit", type=int, default=0, help="unit index (default 0)")
    p.add_argument("--step", type=float, default=None,
                   help="override sweep step in degrees")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calibrate", parents=[common],
                       help="fit polynomial calibrations from a sweep CSV")
    p.add_argument("--data", required=True, metavar="FILE",
                   help="dataset CSV from the sweep command")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("validate", parents=[common],
                       help="run the cyclic validation motion and score it")
    p.add_argument("--cal", required=True, metavar="FILE",
                   help="calibration JSON from the calibrate command")
    p.add_argument("--axis", choices=("pitch", "roll"), default=None,
                   help="override the validation axis")
    p.add_argument("--amplitude", type=float, default=None,
                   help="override tip amplitude in degrees")
    p.add_argument("--cycles", type=int, default=None,
                   help="override the cycle count")
    p.add_argument("--samples-per-cycle", type=int, default=None,
                   help="override samples per cycle")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("demo-fig5", parents=[common],
                       help="linear two-sensor theory demo with correlations")
    p.add_argument("--train-step", type=float, default=1.0,
                   help="training grid step in degrees (default 1.0)")
    p.add_argument("--samples", type=int, default=400,
                   help="test motion sample count (default 400)")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("report", parents=[common],
                       help="recompute error metrics from a trace CSV")
    p.add_argument("--trace", required=True, metavar="FILE",
                   help="trace CSV from the validate command")
    p.add_argument("--cycles", type=int, default=1,
                   help="cycle count in the trace (default 1)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DataFormatError, LengthMismatch, ZeroSpan,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
