import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

import spinclock.cli as cli
import spinclock.experiments as ex
from spinclock.propagator import read_snapshots


def tiny_config(**phys_overrides):
    """A cheap two-row sweep (a few seconds) used by the I/O tests."""
    physics = ex.PhysicsConfig(coupling="larmor", sigma_y_over_d=1.0,
                               y0_over_d=-9.5, measure_time_over_d_over_v0=13.0,
                               omega0=2.0, **phys_overrides)
    return ex.ExperimentConfig(
        preset="custom", physics=physics,
        sweep=ex.SweepConfig("omega0_over_e0", (0.4, 0.5)))


def test_preset_fig1_settings():
    cfg = ex.preset("fig1")
    assert cfg.physics.y0_over_d == -9.5
    assert cfg.physics.sigma_y_over_d == 1.0
    assert cfg.physics.measure_time_over_d_over_v0 == 15.0
    assert cfg.sweep.parameter == "omega0_over_e0"
    assert cfg.sweep.values[0] == pytest.approx(0.01)
    assert cfg.sweep.values[-1] == pytest.approx(0.13)
    assert len(cfg.sweep.values) == 25


def test_preset_fig2_settings():
    cfg = ex.preset("fig2")
    assert cfg.physics.measure_time_over_d_over_v0 == 120.0
    assert cfg.physics.sigma_y_over_d == 10.0
    assert cfg.physics.y0_over_d == -50.0
    assert cfg.physics.omega0_over_e0 == 0.1
    assert cfg.sweep.parameter == "u0_over_e0"
    assert len(cfg.sweep.values) == 31


def test_preset_fig3_settings():
    cfg = ex.preset("fig3")
    assert cfg.physics.l == 2.0
    assert cfg.physics.coupling == "rotating"
    assert cfg.sweep.values[-1] == pytest.approx(6.2)


def test_preset_fig5_settings_and_variants():
    cfg = ex.preset("fig5")
    assert cfg.physics.l == 1.0
    assert cfg.physics.sigma_y_over_d == 10.0
    var = ex.preset("fig5", spin_sign=-1, omega0_over_e0=0.5)
    assert var.physics.spin_sign == -1
    assert var.physics.omega0_over_e0 == 0.5


def test_unknown_preset_rejected():
    with pytest.raises(ex.ConfigError):
        ex.preset("fig4")


def test_validation_errors():
    good = tiny_config()
    with pytest.raises(ex.ConfigError, match="empty"):
        ex.validate_config(dataclasses.replace(
            good, sweep=ex.SweepConfig("u0_over_e0", ())))
    with pytest.raises(ex.ConfigError, match="anchor"):
        ex.validate_config(dataclasses.replace(
            good, physics=dataclasses.replace(good.physics, e0=4.0)))
    with pytest.raises(ex.ConfigError, match="anchor"):
        ex.validate_config(dataclasses.replace(
            good, physics=dataclasses.replace(good.physics, omega0=None)))
    with pytest.raises(ex.ConfigError, match="l >= d"):
        ex.validate_config(dataclasses.replace(
            good, physics=dataclasses.replace(good.physics, coupling="rotating")))
    with pytest.raises(ex.ConfigError, match="parameter"):
        ex.validate_config(dataclasses.replace(
            good, sweep=ex.SweepConfig("sigma_y_over_d", (1.0,))))


config_strategy = st.builds(
    lambda coupling, l_extra, sweep_par, values, anchor_om, ppw: ex.ExperimentConfig(
        preset="custom",
        physics=ex.PhysicsConfig(
            coupling=coupling, l=1.0 + l_extra if coupling == "rotating" else None,
            omega0=2.0 if anchor_om else None, e0=None if anchor_om else 4.0,
            u0_over_e0=0.3),
        numerics=ex.NumericsConfig(ppw=ppw),
        sweep=ex.SweepConfig(sweep_par, values)),
    coupling=st.sampled_from(["larmor", "rotating"]),
    l_extra=st.floats(0, 3),
    sweep_par=st.sampled_from(ex.SWEEP_PARAMETERS),
    values=st.lists(st.floats(0.01, 5.0), min_size=1, max_size=6,
                    unique=True).map(tuple),
    anchor_om=st.booleans(),
    ppw=st.floats(5, 40))


@settings(max_examples=50, deadline=None)
@given(cfg=config_strategy)
def test_config_roundtrip_property(cfg):
    ex.validate_config(cfg)
    data = json.loads(json.dumps(ex.config_to_dict(cfg)))
    assert ex.config_from_dict(data) == cfg


def test_config_file_roundtrip(tmp_path):
    cfg = ex.preset("fig5", spin_sign=-1)
    path = tmp_path / "cfg.json"
    ex.write_config(cfg, path)
    assert ex.read_config(path) == cfg


def test_malformed_json_diagnostics(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"preset": "custom",\n  "sweep": [}\n')
    with pytest.raises(ex.ConfigError, match="line 2"):
        ex.read_config(path)


def test_unknown_keys_rejected(tmp_path):
    cfg = tiny_config()
    data = ex.config_to_dict(cfg)
    data["numerics"]["dx"] = 0.1
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ex.ConfigError, match="dx"):
        ex.read_config(path)


@pytest.fixture(scope="module")
def tiny_result():
    return ex.run(tiny_config(), threads=1, with_oracle=True)


def test_sweep_rows_and_readouts(tiny_result):
    assert len(tiny_result.rows) == 2
    values = [r.sweep_value for r in tiny_result.rows]
    assert values == sorted(values)
    for row in tiny_result.rows:
        assert row.status == "ok"
        assert 0.6 < row.readout.transmission <= 1.0
        assert row.readout.tau_y > 0
        assert np.isnan(row.readout.flip_prob)  # precession runs have no flip
        assert row.readout.diagnostics.norm_drift < 1e-10
        assert "oracle_tau_y" in row.oracle


def test_csv_format(tiny_result, tmp_path):
    path = tmp_path / "out.csv"
    ex.write_csv(tiny_result, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    header = lines[0].split(",")
    assert header[:10] == list(ex.CSV_COLUMNS)
    assert "oracle_tau_y" in header
    assert len(lines) == 1 + len(tiny_result.rows)
    first = lines[1].split(",")
    assert first[0] == "omega0_over_e0"
    # shortest round-trip floats: parsing back reproduces the value exactly
    assert float(first[1]) == tiny_result.rows[0].sweep_value
    assert float(first[2]) == tiny_result.rows[0].readout.tau_y
    meta = json.loads((tmp_path / "out.csv.meta.json").read_text())
    assert meta["sweep_points"] == 2
    assert meta["gauss_hermite_order"] == 41
    assert meta["config"]["physics"]["omega0"] == 2.0


def test_parallel_rows_identical_to_serial(tmp_path):
    cfg = tiny_config()
    serial = ex.run(cfg, threads=1)
    parallel = ex.run(cfg, threads=2)
    p1, p2 = tmp_path / "serial.csv", tmp_path / "parallel.csv"
    ex.write_csv(serial, p1)
    ex.write_csv(parallel, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_row_failure_isolation():
    cfg = dataclasses.replace(tiny_config(),
                              numerics=ex.NumericsConfig(cell_cap=3950))
    result = ex.run(cfg, threads=1)
    statuses = [r.status for r in result.rows]
    assert any(s == "ok" for s in statuses)
    assert any(s.startswith("error:") for s in statuses)
    failed = [r for r in result.rows if r.status != "ok"][0]
    assert np.isnan(failed.readout.tau_y)


def test_snapshot_dump(tmp_path):
    cfg = dataclasses.replace(tiny_config(),
                              sweep=ex.SweepConfig("omega0_over_e0", (0.5,)))
    ex.run(cfg, threads=1, snapshot_dir=tmp_path / "snaps")
    files = sorted((tmp_path / "snaps").iterdir())
    assert [f.name for f in files] == ["row_000.snap"]
    meta, records = read_snapshots(files[0])
    assert len(records) >= 2
    assert meta["n_points"] > 1000


def test_cli_config_run_and_exit_codes(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    ex.write_config(tiny_config(), cfg_path)
    out = tmp_path / "r.csv"
    code = cli.main(["run", "--config", str(cfg_path), "--out", str(out),
                     "--quiet"])
    assert code == 0
    assert out.exists() and out.with_suffix(".csv.meta.json").exists()


def test_cli_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = cli.main(["run", "--config", str(bad), "--out", str(tmp_path / "x.csv"),
                     "--quiet"])
    assert code == 2


def test_cli_all_rows_failed_exit_code(tmp_path):
    cfg = dataclasses.replace(tiny_config(),
                              numerics=ex.NumericsConfig(cell_cap=100))
    cfg_path = tmp_path / "cfg.json"
    ex.write_config(cfg, cfg_path)
    code = cli.main(["run", "--config", str(cfg_path),
                     "--out", str(tmp_path / "x.csv"), "--quiet"])
    assert code == 3


def test_cli_rejects_preset_flags_with_config(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    ex.write_config(tiny_config(), cfg_path)
    code = cli.main(["run", "--config", str(cfg_path), "--spin-sign", "-1",
                     "--out", str(tmp_path / "x.csv"), "--quiet"])
    assert code == 2
