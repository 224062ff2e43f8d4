import numpy as np
import pytest
from scipy.linalg import expm

from spinclock.fields import (free_potential, larmor_profile, no_coupling,
                              rectangular_barrier, rotating_field_profile,
                              sample)
from spinclock.grid import PacketSpec, init_gaussian, make_grid, norm
from spinclock.observables import spin_expectations
from spinclock.oracles import RabiParams, rabi_flip_probability
from spinclock.propagator import (EvolveParams, NumericalError, SnapshotWriter,
                                  auto_resolution, energy_expectation, evolve,
                                  rabi_flip_simulated, read_snapshots,
                                  refine_resolution, step)


def test_free_step_conserves_norm():
    grid = make_grid(-30, 30, 801)
    fld = init_gaussian(grid, PacketSpec(y0=0.0, sigma_y=1.5, k0=3.0))
    ham = sample(grid, free_potential(), no_coupling())
    out = step(fld, ham, 1e-3)
    assert abs(norm(out, grid.y_min, grid.y_max) - 1.0) <= 1e-13


def test_zero_steps_returns_state_unchanged():
    grid = make_grid(-30, 30, 401)
    fld = init_gaussian(grid, PacketSpec(y0=0.0, sigma_y=1.5, k0=3.0))
    ham = sample(grid, free_potential(), no_coupling())
    out, diag = evolve(fld, ham, EvolveParams(dt=1e-3, t_final=0.0))
    assert diag.steps_taken == 0
    assert np.array_equal(out.amp_up, fld.amp_up)
    assert np.array_equal(out.amp_down, fld.amp_down)


def test_grid_mismatch_rejected():
    g1 = make_grid(-30, 30, 401)
    g2 = make_grid(-30, 30, 402)
    fld = init_gaussian(g1, PacketSpec(y0=0.0, sigma_y=1.5, k0=3.0))
    ham = sample(g2, free_potential(), no_coupling())
    with pytest.raises(ValueError):
        step(fld, ham, 1e-3)


def test_uniform_field_spin_precession():
    # coupling window covering the whole grid: the spin factorizes exactly and
    # precesses about z at omega0 regardless of the packet's spreading
    grid = make_grid(-20, 20, 513)
    fld = init_gaussian(grid, PacketSpec(y0=0.0, sigma_y=2.0, k0=0.0))
    om = 2.0
    ham = sample(grid, free_potential(), larmor_profile(om, D=20.0))
    t = np.pi / (2 * om)
    dt = t / 400
    out, _ = evolve(fld, ham, EvolveParams(dt=dt, t_final=t))
    se = spin_expectations(out, grid.y_min)
    angle = np.arctan2(-se.sy, se.sx)
    assert angle == pytest.approx(om * t, abs=1e-10)
    assert se.sx == pytest.approx(0.0, abs=1e-10)
    assert se.sy == pytest.approx(-0.5, abs=1e-10)


def test_free_gaussian_center_and_spread():
    # analytic free-packet law: <y> = y0 + v0 t, sigma(t) = sigma0 sqrt(1+(t/2sigma0^2)^2)
    k0, sigma0, y0, t = 0.75, 2.0, -10.0, 20.0
    dy = 0.035
    n = int(round(110 / dy)) + 1
    grid = make_grid(-60.0, -60.0 + (n - 1) * dy, n)
    fld = init_gaussian(grid, PacketSpec(y0=y0, sigma_y=sigma0, k0=k0))
    ham = sample(grid, free_potential(), no_coupling())
    dt = 0.2 * dy * dy
    out, diag = evolve(fld, ham, EvolveParams(dt=dt, t_final=t,
                                              snapshot_stride=20000))
    y = grid.nodes
    dens = out.density()
    w = np.full(n, dy)
    w[0] = w[-1] = dy / 2
    total = float(np.dot(w, dens))
    mean = float(np.dot(w, y * dens)) / total
    var = float(np.dot(w, (y - mean) ** 2 * dens)) / total
    assert abs(mean - (y0 + k0 * t)) <= 0.1 * dy
    sigma_t = sigma0 * np.sqrt(1 + (t / (2 * sigma0 ** 2)) ** 2)
    assert np.sqrt(var) == pytest.approx(sigma_t, rel=0.01)
    assert diag.norm_drift < 1e-11


def test_unitarity_and_sigma_z_conservation_long_run():
    grid = make_grid(-40, 40, 1601)
    fld = init_gaussian(grid, PacketSpec(y0=-15.0, sigma_y=2.0, k0=4.0))
    ham = sample(grid, rectangular_barrier(8.0, 1.0), larmor_profile(0.8, 1.0))
    params = EvolveParams(dt=2.5e-4, t_final=5.0, snapshot_stride=500,
                          boundary_margin=4.0)
    out, diag = evolve(fld, ham, params)
    assert diag.steps_taken == 20000
    assert diag.norm_drift <= 1e-11
    assert diag.spin_z_drift <= 1e-12


def test_energy_conservation():
    grid = make_grid(-40, 40, 2001)
    fld = init_gaussian(grid, PacketSpec(y0=-15.0, sigma_y=2.0, k0=4.0))
    ham = sample(grid, rectangular_barrier(6.0, 1.0),
                 rotating_field_profile(1.0, 1.0, 2.0))
    e0 = energy_expectation(fld, ham)
    seen = []
    obs = lambda i, t, f: seen.append(energy_expectation(f, ham))
    evolve(fld, ham, EvolveParams(dt=1e-4, t_final=2.0, snapshot_stride=2000),
           observers=[obs])
    drift = max(abs(e - e0) for e in seen)
    assert drift <= 1e-8 * 8.0  # 1e-8 * E0 with E0 = k0^2/2 = 8


def test_matches_dense_matrix_exponential():
    # brute-force propagator on a coarse grid: expm of the full 2n x 2n
    # Hamiltonian, same spatial discretization
    n = 240
    grid = make_grid(-12.0, 12.0, n)
    dy = grid.dy
    fld = init_gaussian(grid, PacketSpec(y0=-4.0, sigma_y=1.0, k0=2.0,
                                         spin_axis=(1, 0, 0), spin_sign=1))
    ham = sample(grid, rectangular_barrier(2.0, 1.0),
                 rotating_field_profile(1.5, 1.0, 1.5))
    lap = (np.diag(np.full(n, 1.0)) - 0.5 * np.diag(np.ones(n - 1), 1)
           - 0.5 * np.diag(np.ones(n - 1), -1)) / dy**2
    h00 = lap + np.diag(ham.u + ham.h_sf[:, 0, 0].real)
    h11 = lap + np.diag(ham.u + ham.h_sf[:, 1, 1].real)
    big = np.zeros((2 * n, 2 * n), dtype=complex)
    big[:n, :n] = h00
    big[n:, n:] = h11
    big[:n, n:] = np.diag(ham.h_sf[:, 0, 1])
    big[n:, :n] = np.diag(ham.h_sf[:, 1, 0])
    t_final = 0.25
    psi = np.concatenate([fld.amp_up, fld.amp_down])
    ref = expm(-1j * big * t_final) @ psi
    dt = t_final / 8000
    out, _ = evolve(fld, ham, EvolveParams(dt=dt, t_final=t_final,
                                           snapshot_stride=10000))
    diff = np.concatenate([out.amp_up, out.amp_down]) - ref
    err = np.sqrt(float(np.vdot(diff, diff).real) * dy)
    assert err <= 1e-6


@pytest.mark.parametrize("x", [0.3, 1.0, np.sqrt(3.0)])
def test_spin_only_integrator_matches_flip_formula(x):
    omega_rot = 2.0
    p = RabiParams(omega0=x * omega_rot, v0=2.0 * omega_rot / np.pi, D=1.0)
    assert p.omega_rot == pytest.approx(omega_rot, rel=1e-14)
    sim = rabi_flip_simulated(p.omega0, omega_rot, 1, n_substeps=50_000)
    assert sim == pytest.approx(rabi_flip_probability(p), abs=1e-6)


def test_auto_resolution_scaling_rules():
    pot = free_potential()
    sf = no_coupling()
    # spacing tracks k_max = k0 + 6/sigma_y (+ potential term): with k0
    # dominant, doubling k0 close to halves dy; the bound dy <= 2pi/(k_max ppw)
    # holds exactly
    base = auto_resolution(PacketSpec(-30.0, 10.0, 60.0), pot, sf, 0.5)
    doubled_k = auto_resolution(PacketSpec(-30.0, 10.0, 120.0), pot, sf, 0.5)
    assert base.grid.dy <= 2 * np.pi / (base.k_max * 20.0) * (1 + 1e-12)
    assert doubled_k.grid.dy <= base.grid.dy / 1.85
    sf2 = larmor_profile(1.0, 1.0)
    short = auto_resolution(PacketSpec(-9.5, 1.0, 5.0), pot, sf2, 2.0)
    longer = auto_resolution(PacketSpec(-9.5, 1.0, 5.0), pot, sf2, 4.0)
    span = lambda r: r.grid.y_max - r.grid.y_min
    assert span(longer) > span(short)
    assert longer.grid.y_max > short.grid.y_max


def test_auto_resolution_places_edges_between_nodes():
    res = auto_resolution(PacketSpec(-9.5, 1.0, 5.0), rectangular_barrier(3.0, 1.0),
                          larmor_profile(1.0, 1.0), 2.0)
    frac = (1.0 - res.grid.y_min) / res.grid.dy % 1.0
    assert frac == pytest.approx(0.5, abs=1e-9)
    # dt rule: eta * 2m * dy^2
    assert res.dt == pytest.approx(0.1 * 2 * res.grid.dy ** 2)


def test_auto_resolution_cell_cap():
    with pytest.raises(ValueError):
        auto_resolution(PacketSpec(-9.5, 1.0, 50.0), free_potential(),
                        larmor_profile(1.0, 1.0), 50.0, cell_cap=10_000)


def test_refine_resolution_halves_spacing_and_keeps_alignment():
    res = auto_resolution(PacketSpec(-9.5, 1.0, 5.0), rectangular_barrier(3.0, 1.0),
                          larmor_profile(1.0, 1.0), 2.0)
    fine = refine_resolution(res, 2)
    assert fine.grid.dy == pytest.approx(res.grid.dy / 2, rel=1e-14)
    assert fine.dt == pytest.approx(res.dt / 2, rel=1e-14)
    frac = (1.0 - fine.grid.y_min) / fine.grid.dy % 1.0
    assert frac == pytest.approx(0.5, abs=1e-9)


def test_boundary_contamination_aborts():
    grid = make_grid(-20.0, 12.0, 800)
    fld = init_gaussian(grid, PacketSpec(y0=-10.0, sigma_y=1.0, k0=5.0))
    ham = sample(grid, free_potential(), no_coupling())
    params = EvolveParams(dt=2e-4, t_final=5.0, snapshot_stride=200,
                          boundary_margin=2.0, boundary_tol=1e-9)
    with pytest.raises(NumericalError, match="boundary_norm"):
        evolve(fld, ham, params)


def test_nan_input_aborts_with_diagnostic():
    grid = make_grid(-20.0, 20.0, 400)
    fld = init_gaussian(grid, PacketSpec(y0=0.0, sigma_y=1.0, k0=2.0))
    fld.amp_up[10] = np.nan
    ham = sample(grid, free_potential(), no_coupling())
    with pytest.raises(NumericalError, match="non-finite"):
        evolve(fld, ham, EvolveParams(dt=1e-4, t_final=0.01, snapshot_stride=1))


def test_snapshot_roundtrip(tmp_path):
    grid = make_grid(-20.0, 20.0, 300)
    fld = init_gaussian(grid, PacketSpec(y0=0.0, sigma_y=1.5, k0=2.0))
    ham = sample(grid, free_potential(), no_coupling())
    path = tmp_path / "run.snap"
    with SnapshotWriter(path, grid) as writer:
        evolve(fld, ham, EvolveParams(dt=1e-4, t_final=0.05, snapshot_stride=100),
               observers=[writer])
    meta, records = read_snapshots(path)
    assert meta["n_points"] == 300
    assert meta["dy"] == grid.dy and meta["y_min"] == grid.y_min
    assert len(records) == 5
    step_index, t, up, dn = records[-1]
    assert step_index == 500
    assert t == pytest.approx(0.05)
    dens = np.abs(up) ** 2 + np.abs(dn) ** 2
    assert float(dens.sum() * grid.dy) == pytest.approx(1.0, abs=1e-6)


def test_observer_states_are_canonical_step_boundaries():
    # evolving in two stages must agree with one uninterrupted run at the
    # matching checkpoint (the fused rotations are unfused at checkpoints)
    grid = make_grid(-20.0, 20.0, 500)
    fld = init_gaussian(grid, PacketSpec(y0=-5.0, sigma_y=1.5, k0=2.0))
    ham = sample(grid, free_potential(), larmor_profile(1.3, 3.0))
    dt = 1e-4
    mid, _ = evolve(fld, ham, EvolveParams(dt=dt, t_final=0.02, snapshot_stride=50))
    end_a, _ = evolve(mid, ham, EvolveParams(dt=dt, t_final=0.02, snapshot_stride=50))
    end_b, _ = evolve(fld, ham, EvolveParams(dt=dt, t_final=0.04, snapshot_stride=50))
    assert np.allclose(end_a.amp_up, end_b.amp_up, atol=1e-12)
    assert np.allclose(end_a.amp_down, end_b.amp_down, atol=1e-12)
