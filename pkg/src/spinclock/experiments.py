"""Experiment presets, the parameter-sweep runner, and config/CSV I/O.

A sweep varies exactly one dimensionless ratio. The absolute energy scale is
set by exactly one anchor: a fixed coupling omega0 (ratio sweeps realized by
varying the packet speed, the central energy E0 being derived) or a fixed
E0 (barrier-height sweeps). Everything else is stated in the dimensionless
ratios carried by PhysicsConfig.

Rows are independent pure jobs: they may run in parallel worker processes,
results are reassembled in sweep order, and a failing row is recorded in its
status field without voiding the sweep. Identical configs produce
byte-identical CSV numeric fields regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .fields import (larmor_profile, rectangular_barrier, rotating_field_profile,
                     sample)
from .grid import PacketSpec, init_gaussian
from .observables import (ClockReadout, larmor_times,
                          mean_kinetic_energy_transmitted, spin_expectations,
                          spin_flip_probability, transmission_probability)
from .oracles import (GH_ORDER, free_flight_time, packet_averaged_larmor_times,
                      packet_averaged_transmission, rabi_flip_probability,
                      RabiParams)
from .propagator import (EvolveParams, NumericalError, SnapshotWriter,
                         auto_resolution, evolve, refine_resolution)

PRESET_NAMES = ("fig1", "fig2", "fig3", "fig5")
SWEEP_PARAMETERS = ("omega0_over_e0", "u0_over_e0")
CSV_COLUMNS = ("sweep_param", "sweep_value", "tau_y", "tau_z", "transmission",
               "flip_prob", "mean_kinetic_energy", "norm_drift",
               "boundary_norm", "status")


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class PhysicsConfig:
    d: float = 1.0
    l: float | None = None                 # wing edge of the rotating coupling
    coupling: str = "larmor"               # "larmor" | "rotating"
    omega0_over_e0: float = 0.1
    u0_over_e0: float = 0.0
    sigma_y_over_d: float = 1.0
    y0_over_d: float = -9.5
    spin_axis: tuple[float, float, float] = (1.0, 0.0, 0.0)
    spin_sign: int = 1
    measure_time_over_d_over_v0: float = 15.0
    omega0: float | None = None            # absolute anchor (ratio sweeps)
    e0: float | None = None                # absolute anchor (barrier sweeps)


@dataclass(frozen=True)
class NumericsConfig:
    ppw: float = 20.0
    eta: float = 0.1
    cell_cap: int = 2_000_000
    boundary_tol: float = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "custom"
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sweep: SweepConfig = field(default_factory=lambda: SweepConfig(
        "u0_over_e0", (0.0,)))
    output: str | None = None


@dataclass
class RowResult:
    sweep_value: float
    readout: ClockReadout
    status: str = "ok"
    oracle: dict | None = None


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[RowResult]
    metadata: dict


def validate_config(cfg: ExperimentConfig) -> None:
    ph, sw = cfg.physics, cfg.sweep
    if cfg.preset not in PRESET_NAMES + ("custom",):
        raise ConfigError(f"unknown preset {cfg.preset!r}")
    if ph.coupling not in ("larmor", "rotating"):
        raise ConfigError(f"physics.coupling must be larmor|rotating, got {ph.coupling!r}")
    if ph.d <= 0:
        raise ConfigError(f"physics.d must be positive, got {ph.d}")
    if ph.coupling == "rotating":
        if ph.l is None or ph.l < ph.d:
            raise ConfigError(f"rotating coupling needs physics.l >= d, got l={ph.l}")
    if ph.sigma_y_over_d <= 0:
        raise ConfigError("physics.sigma_y_over_d must be positive")
    if ph.measure_time_over_d_over_v0 <= 0:
        raise ConfigError("physics.measure_time_over_d_over_v0 must be positive")
    if ph.spin_sign not in (1, -1):
        raise ConfigError(f"physics.spin_sign must be +1 or -1, got {ph.spin_sign}")
    if (ph.omega0 is None) == (ph.e0 is None):
        raise ConfigError("exactly one absolute anchor required: physics.omega0 "
                          "or physics.e0")
    if sw.parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"sweep.parameter must be one of {SWEEP_PARAMETERS}, "
                          f"got {sw.parameter!r}")
    if len(sw.values) == 0:
        raise ConfigError("sweep.values must not be empty")
    if sw.parameter == "omega0_over_e0" and min(sw.values) <= 0:
        raise ConfigError("omega0_over_e0 sweep values must be positive")
    if sw.parameter == "u0_over_e0" and min(sw.values) < 0:
        raise ConfigError("u0_over_e0 sweep values must be non-negative")
    if ph.omega0_over_e0 <= 0:
        raise ConfigError("physics.omega0_over_e0 must be positive")
    if ph.u0_over_e0 < 0:
        raise ConfigError("physics.u0_over_e0 must be non-negative")
    nm = cfg.numerics
    if nm.ppw < 4 or nm.eta <= 0 or nm.eta >= 1 or nm.cell_cap < 16:
        raise ConfigError("numerics out of range (need ppw >= 4, 0 < eta < 1, "
                          "cell_cap >= 16)")


def preset(name: str, **overrides) -> ExperimentConfig:
    """Built-in experiment presets; keyword overrides patch physics fields
    (e.g. spin_sign=-1, omega0_over_e0=0.5) or sweep point count (points=N)."""
    if name == "fig1":
        # time-of-flight through the precession window, speed sweep
        physics = PhysicsConfig(coupling="larmor", sigma_y_over_d=1.0,
                                y0_over_d=-9.5, measure_time_over_d_over_v0=15.0,
                                omega0=26.0)
        sweep = SweepConfig("omega0_over_e0",
                            tuple(np.geomspace(0.01, 0.13, 25)))
    elif name == "fig2":
        # precession clock on a barrier, height sweep
        physics = PhysicsConfig(coupling="larmor", omega0_over_e0=0.1,
                                sigma_y_over_d=10.0, y0_over_d=-50.0,
                                measure_time_over_d_over_v0=120.0, e0=8.0)
        sweep = SweepConfig("u0_over_e0", tuple(np.linspace(0.0, 2.0, 31)))
    elif name == "fig3":
        # rotating-field spin flip, speed sweep
        physics = PhysicsConfig(coupling="rotating", l=2.0, sigma_y_over_d=1.0,
                                y0_over_d=-9.5, measure_time_over_d_over_v0=15.0,
                                omega0=26.0)
        sweep = SweepConfig("omega0_over_e0",
                            tuple(np.geomspace(0.01, 6.2, 25)))
    elif name == "fig5":
        # rotating field inside a barrier, height sweep
        physics = PhysicsConfig(coupling="rotating", l=1.0, omega0_over_e0=0.1,
                                sigma_y_over_d=10.0, y0_over_d=-50.0,
                                measure_time_over_d_over_v0=120.0, e0=8.0)
        sweep = SweepConfig("u0_over_e0", tuple(np.linspace(0.0, 2.0, 31)))
    else:
        raise ConfigError(f"unknown preset {name!r}")
    points = overrides.pop("points", None)
    if points is not None:
        lo, hi = sweep.values[0], sweep.values[-1]
        if sweep.parameter == "omega0_over_e0":
            sweep = SweepConfig(sweep.parameter, tuple(np.geomspace(lo, hi, points)))
        else:
            sweep = SweepConfig(sweep.parameter, tuple(np.linspace(lo, hi, points)))
    if overrides:
        bad = set(overrides) - {f.name for f in dataclasses.fields(PhysicsConfig)}
        if bad:
            raise ConfigError(f"unknown preset overrides: {sorted(bad)}")
        physics = dataclasses.replace(physics, **overrides)
    cfg = ExperimentConfig(preset=name, physics=physics, sweep=sweep)
    validate_config(cfg)
    return cfg


@dataclass(frozen=True)
class _RowSetup:
    """Fully derived physical scenario for one sweep point."""

    packet: PacketSpec
    pot: object
    sf: object
    omega0: float
    e0: float
    u0: float
    v0: float
    t_final: float
    y_cut: float
    d: float
    sigma_y: float


def _derive_row(cfg: ExperimentConfig, value: float) -> _RowSetup:
    ph = cfg.physics
    r_om = ph.omega0_over_e0
    r_u = ph.u0_over_e0
    if cfg.sweep.parameter == "omega0_over_e0":
        r_om = value
    else:
        r_u = value
    if ph.omega0 is not None:
        omega0 = ph.omega0
        e0 = omega0 / r_om
    else:
        e0 = ph.e0
        omega0 = r_om * e0
    k0 = math.sqrt(2.0 * e0)
    v0 = k0
    u0 = r_u * e0
    d = ph.d
    sigma_y = ph.sigma_y_over_d * d
    packet = PacketSpec(y0=ph.y0_over_d * d, sigma_y=sigma_y, k0=k0,
                        spin_axis=ph.spin_axis, spin_sign=ph.spin_sign)
    if ph.coupling == "larmor":
        sf = larmor_profile(omega0, d)
        pot = rectangular_barrier(u0, d) if u0 > 0 else rectangular_barrier(0.0, d)
        y_cut = d
    else:
        sf = rotating_field_profile(omega0, d, ph.l)
        pot = rectangular_barrier(u0, ph.l) if u0 > 0 else rectangular_barrier(0.0, ph.l)
        y_cut = ph.l if u0 > 0 else d
    t_final = ph.measure_time_over_d_over_v0 * d / v0
    return _RowSetup(packet, pot, sf, omega0, e0, u0, v0, t_final, y_cut, d,
                     sigma_y)


def _oracle_columns(cfg: ExperimentConfig, setup: _RowSetup) -> dict:
    ph = cfg.physics
    if ph.coupling == "larmor":
        if setup.u0 > 0:
            ty, tz = packet_averaged_larmor_times(
                setup.packet.k0, setup.sigma_y, setup.u0, setup.omega0, setup.d)
            return {"oracle_tau_y": ty, "oracle_tau_z": tz,
                    "oracle_transmission": packet_averaged_transmission(
                        setup.packet.k0, setup.sigma_y, setup.u0, setup.omega0,
                        setup.d)}
        return {"oracle_tau_y": free_flight_time(setup.d, setup.v0)}
    p = RabiParams(setup.omega0, setup.v0, setup.d)
    cols = {"oracle_flip_prob": rabi_flip_probability(p)}
    if setup.u0 > 0:
        # adiabatic single-channel estimate: the component following the
        # local field rides an effective barrier u0 + spin_sign*omega0/2
        u_eff = setup.u0 + cfg.physics.spin_sign * setup.omega0 / 2.0
        cols["oracle_transmission"] = packet_averaged_transmission(
            setup.packet.k0, setup.sigma_y, u_eff, 0.0, setup.pot.half_width)
    return cols


def run_row(cfg: ExperimentConfig, value: float, with_oracle: bool = False,
            snapshot_path=None, refine_factor: int = 1) -> RowResult:
    """Compute one sweep row; numerical failures are captured in the status.

    refine_factor > 1 reruns the same physical scenario at dy/f and dt/f
    (simultaneous refinement, used by the convergence checks).
    """
    setup = _derive_row(cfg, value)
    readout = ClockReadout()
    try:
        res = auto_resolution(setup.packet, setup.pot, setup.sf, setup.t_final,
                              ppw=cfg.numerics.ppw, eta=cfg.numerics.eta,
                              cell_cap=cfg.numerics.cell_cap)
        if refine_factor > 1:
            res = refine_resolution(res, refine_factor)
        ham = sample(res.grid, setup.pot, setup.sf,
                     margin=8.0 * setup.packet.sigma_y)
        fld = init_gaussian(res.grid, setup.packet)
        steps = math.ceil(setup.t_final / res.dt)
        stride = max(200, steps // 50)
        params = EvolveParams(dt=res.dt, t_final=setup.t_final,
                              snapshot_stride=stride,
                              boundary_margin=4.0 * setup.packet.sigma_y,
                              boundary_tol=cfg.numerics.boundary_tol)
        observers = []
        writer = None
        if snapshot_path is not None:
            writer = SnapshotWriter(snapshot_path, res.grid)
            observers.append(writer)
        try:
            final, diag = evolve(fld, ham, params, observers=observers)
        finally:
            if writer is not None:
                writer.close()
        readout.diagnostics = diag
        readout.transmission = transmission_probability(final, setup.y_cut)
        readout.mean_kinetic_energy = mean_kinetic_energy_transmitted(
            final, setup.y_cut)
        if cfg.physics.coupling == "larmor":
            spins = spin_expectations(final, setup.y_cut)
            readout.tau_y, readout.tau_z = larmor_times(spins, setup.omega0)
        else:
            exit_axis = setup.sf.field_direction(setup.d)
            readout.flip_prob = spin_flip_probability(
                final, setup.y_cut, exit_axis, cfg.physics.spin_sign)
        status = "ok"
    except (NumericalError, ValueError) as exc:
        status = f"error: {exc}"
    oracle = _oracle_columns(cfg, setup) if with_oracle else None
    return RowResult(float(value), readout, status, oracle)


def run(cfg: ExperimentConfig, threads: int = 1, with_oracle: bool = False,
        snapshot_dir=None, progress=None) -> SweepResult:
    """Run the sweep, optionally across worker processes; rows are pure jobs
    and the result order is fixed by the sorted sweep values."""
    validate_config(cfg)
    values = sorted(cfg.sweep.values)
    snap_paths = [None] * len(values)
    if snapshot_dir is not None:
        os.makedirs(snapshot_dir, exist_ok=True)
        snap_paths = [os.path.join(snapshot_dir, f"row_{i:03d}.snap")
                      for i in range(len(values))]
    if threads <= 1:
        rows = []
        for i, v in enumerate(values):
            rows.append(run_row(cfg, v, with_oracle, snap_paths[i]))
            if progress:
                progress(rows[-1])
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_row, cfg, v, with_oracle, snap_paths[i])
                       for i, v in enumerate(values)]
            rows = []
            for fut in futures:
                rows.append(fut.result())
                if progress:
                    progress(rows[-1])
    metadata = {
        "config": config_to_dict(cfg),
        "code_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "sweep_points": len(values),
    }
    if with_oracle:
        metadata["gauss_hermite_order"] = GH_ORDER
    return SweepResult(cfg, rows, metadata)


# ---------------------------------------------------------------------------
# serialization

def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(result: SweepResult, path) -> None:
    """Fixed column set plus any oracle_* columns; shortest round-trip float
    formatting, LF line endings, UTF-8."""
    import csv as _csv

    oracle_cols: list[str] = []
    for row in result.rows:
        if row.oracle:
            for key in row.oracle:
                if key not in oracle_cols:
                    oracle_cols.append(key)
    oracle_cols.sort()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(list(CSV_COLUMNS) + oracle_cols)
        for row in result.rows:
            r = row.readout
            d = r.diagnostics
            rec = [result.config.sweep.parameter, _fmt(row.sweep_value),
                   _fmt(r.tau_y), _fmt(r.tau_z), _fmt(r.transmission),
                   _fmt(r.flip_prob), _fmt(r.mean_kinetic_energy),
                   _fmt(d.norm_drift) if d else "nan",
                   _fmt(d.boundary_norm) if d else "nan",
                   row.status]
            for key in oracle_cols:
                rec.append(_fmt(row.oracle[key]) if row.oracle and key in
                           row.oracle else "nan")
            writer.writerow(rec)
    meta_path = str(path) + ".meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(result.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_csv(path) -> list[dict]:
    """Parse a sweep CSV back into row dicts (floats where parseable)."""
    import csv as _csv

    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for rec in _csv.DictReader(fh):
            row = {}
            for key, val in rec.items():
                if key in ("sweep_param", "status"):
                    row[key] = val
                else:
                    row[key] = float(val)
            rows.append(row)
    return rows


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["physics"]["spin_axis"] = list(cfg.physics.spin_axis)
    d["sweep"]["values"] = list(cfg.sweep.values)
    return d


def _build(cls, data: dict, path: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {path}")
    return data


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _build(ExperimentConfig, data, "config")
    kwargs = {}
    if "physics" in data:
        ph = _build(PhysicsConfig, dict(data["physics"]), "config.physics")
        if "spin_axis" in ph:
            ph["spin_axis"] = tuple(float(c) for c in ph["spin_axis"])
        kwargs["physics"] = PhysicsConfig(**ph)
    if "numerics" in data:
        nm = _build(NumericsConfig, dict(data["numerics"]), "config.numerics")
        kwargs["numerics"] = NumericsConfig(**nm)
    if "sweep" in data:
        sw = _build(SweepConfig, dict(data["sweep"]), "config.sweep")
        if "values" in sw:
            sw["values"] = tuple(float(v) for v in sw["values"])
        kwargs["sweep"] = SweepConfig(**sw)
    else:
        raise ConfigError("config.sweep is required")
    for key in ("preset", "output"):
        if key in data:
            kwargs[key] = data[key]
    cfg = ExperimentConfig(**kwargs)
    validate_config(cfg)
    return cfg


def write_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2)
        fh.write("\n")


def read_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(data)
