"""Command-line entry point: `spinclock run ...` executes a sweep to CSV.

Exit codes: 0 success, 2 configuration error, 3 numerical failure in every
row of the sweep.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .experiments import (ConfigError, preset, read_config, run,
                          validate_config, write_csv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinclock",
        description="1D spin-1/2 quantum-clock experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a parameter sweep and write a CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=("fig1", "fig2", "fig3", "fig5"),
                     help="built-in experiment preset")
    src.add_argument("--config", help="JSON config file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes for sweep rows (default 1)")
    p.add_argument("--ppw", type=float, default=None,
                   help="override points-per-wavelength of the grid")
    p.add_argument("--overlay-oracle", action="store_true",
                   help="append closed-form oracle_* columns")
    p.add_argument("--dump-snapshots", metavar="DIR", default=None,
                   help="write per-row binary wavefunction snapshots into DIR")
    p.add_argument("--spin-sign", type=int, choices=(1, -1), default=None,
                   help="override the initial spin sign (presets only)")
    p.add_argument("--omega0-over-e0", type=float, default=None,
                   help="override the coupling ratio (presets only)")
    p.add_argument("--points", type=int, default=None,
                   help="override the preset's sweep point count")
    p.add_argument("--quiet", action="store_true", help="suppress progress lines")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.preset:
            overrides = {}
            if args.spin_sign is not None:
                overrides["spin_sign"] = args.spin_sign
            if args.omega0_over_e0 is not None:
                overrides["omega0_over_e0"] = args.omega0_over_e0
            if args.points is not None:
                overrides["points"] = args.points
            cfg = preset(args.preset, **overrides)
        else:
            if args.spin_sign is not None or args.omega0_over_e0 is not None \
                    or args.points is not None:
                raise ConfigError("--spin-sign/--omega0-over-e0/--points apply "
                                  "to presets, not --config runs")
            cfg = read_config(args.config)
        if args.ppw is not None:
            cfg = dataclasses.replace(
                cfg, numerics=dataclasses.replace(cfg.numerics, ppw=args.ppw))
        validate_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    def progress(row):
        if not args.quiet:
            print(f"  {cfg.sweep.parameter}={row.sweep_value:.6g}  "
                  f"status={row.status}", file=sys.stderr)

    result = run(cfg, threads=max(1, args.threads),
                 with_oracle=args.overlay_oracle,
                 snapshot_dir=args.dump_snapshots, progress=progress)
    write_csv(result, args.out)
    n_failed = sum(1 for r in result.rows if r.status != "ok")
    if not args.quiet:
        print(f"wrote {args.out}: {len(result.rows)} rows, {n_failed} failed",
              file=sys.stderr)
    if n_failed == len(result.rows):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
