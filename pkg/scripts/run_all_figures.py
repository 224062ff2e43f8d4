#!/usr/bin/env python3
"""Run every experiment preset and write the CSVs the figure renderer
consumes. The spin-flip presets are run for both initial spin signs, and the
barrier+rotator preset for both coupling strengths.

Usage: python scripts/run_all_figures.py [outdir] [--threads N] [--points N]
"""

import argparse
import pathlib
import sys
import time

import spinclock.cli as cli


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", nargs="?", default="results")
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--points", type=int, default=None,
                    help="reduce the sweep point count for a quick pass")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    runs = [
        (["--preset", "fig1"], "fig1.csv"),
        (["--preset", "fig2"], "fig2.csv"),
        (["--preset", "fig3", "--spin-sign", "1"], "fig3_up.csv"),
        (["--preset", "fig3", "--spin-sign", "-1"], "fig3_down.csv"),
        (["--preset", "fig5", "--omega0-over-e0", "0.1", "--spin-sign", "1"],
         "fig5_om0.1_up.csv"),
        (["--preset", "fig5", "--omega0-over-e0", "0.1", "--spin-sign", "-1"],
         "fig5_om0.1_down.csv"),
        (["--preset", "fig5", "--omega0-over-e0", "0.5", "--spin-sign", "1"],
         "fig5_om0.5_up.csv"),
        (["--preset", "fig5", "--omega0-over-e0", "0.5", "--spin-sign", "-1"],
         "fig5_om0.5_down.csv"),
    ]
    for extra, name in runs:
        argv = ["run", *extra, "--out", str(outdir / name),
                "--threads", str(args.threads), "--overlay-oracle"]
        if args.points:
            argv += ["--points", str(args.points)]
        print(f"== spinclock {' '.join(argv)}", flush=True)
        t0 = time.perf_counter()
        code = cli.main(argv)
        print(f"   -> exit {code} in {time.perf_counter() - t0:.0f}s", flush=True)
        if code != 0:
            return code
    print(f"all CSVs in {outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
