#!/usr/bin/env python3
"""Observed convergence order of the clock readouts under simultaneous
(dy, dt) refinement by 2x and 4x, at the midpoints of the two speed sweeps.

Usage: python scripts/convergence_study.py
"""

import sys
import time

import numpy as np

import spinclock.experiments as ex


def study(name):
    cfg = ex.preset(name)
    mid = cfg.sweep.values[len(cfg.sweep.values) // 2]
    field = "tau_y" if cfg.physics.coupling == "larmor" else "flip_prob"
    vals = []
    for factor in (1, 2, 4):
        t0 = time.perf_counter()
        row = ex.run_row(cfg, mid, refine_factor=factor)
        assert row.status == "ok", row.status
        q = getattr(row.readout, field)
        vals.append(q)
        print(f"  {name} mid={mid:.4g} refine x{factor}: {field}={q:.9f} "
              f"({time.perf_counter() - t0:.0f}s)", flush=True)
    order = np.log2(abs(vals[0] - vals[1]) / abs(vals[1] - vals[2]))
    print(f"  {name}: observed order {order:.3f}")
    return order


def main() -> int:
    ok = True
    for name in ("fig1", "fig3"):
        ok &= study(name) >= 1.8
    print("convergence order >= 1.8:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
