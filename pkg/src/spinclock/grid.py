"""Uniform 1D grid and the two-component (spinor) wavefunction living on it.

Conventions used throughout the package: natural units hbar = m = 1, the
spinor is stored in the sigma_z eigenbasis, and discrete norms are
trapezoid-weighted so that window integrals are exactly additive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Pauli matrices in the sigma_z basis (shared by several modules).
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

GAUSSIAN_TAIL_SIGMAS = 8.0  # packet-boundary clearance; tail mass < 1e-14


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with nodes y_j = y_min + j*dy, j = 0..n_points-1."""

    y_min: float
    y_max: float
    n_points: int

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / (self.n_points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.y_min + self.dy * np.arange(self.n_points)


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian packet exp(-(y-y0)^2/(4 sigma_y^2) + i k0 y) with a spin label.

    The spin label is the eigenstate of (spin_axis . sigma) with eigenvalue
    spin_sign (+1 or -1).
    """

    y0: float
    sigma_y: float
    k0: float
    spin_axis: tuple[float, float, float] = (1.0, 0.0, 0.0)
    spin_sign: int = 1

    def __post_init__(self):
        if not (self.sigma_y > 0):
            raise ValueError(f"sigma_y must be positive, got {self.sigma_y}")
        if not (self.k0 >= 0):
            raise ValueError(f"k0 must be non-negative, got {self.k0}")
        if self.spin_sign not in (+1, -1):
            raise ValueError(f"spin_sign must be +1 or -1, got {self.spin_sign}")
        axis = np.asarray(self.spin_axis, dtype=float)
        if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise ValueError(f"spin_axis must be a unit 3-vector, got {self.spin_axis}")


@dataclass
class SpinorField:
    """Two complex amplitudes per node: psi_up(y_j), psi_down(y_j) (sigma_z basis)."""

    grid: Grid1D
    amp_up: np.ndarray
    amp_down: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        if self.amp_up.shape != (n,) or self.amp_down.shape != (n,):
            raise ValueError("amplitude arrays must match grid.n_points")

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.amp_up.copy(), self.amp_down.copy())

    def density(self) -> np.ndarray:
        return (self.amp_up.real**2 + self.amp_up.imag**2
                + self.amp_down.real**2 + self.amp_down.imag**2)


def make_grid(y_min: float, y_max: float, n_points: int) -> Grid1D:
    """Build a uniform grid; rejects degenerate or non-finite domains."""
    if not (np.isfinite(y_min) and np.isfinite(y_max)):
        raise ValueError(f"grid bounds must be finite, got [{y_min}, {y_max}]")
    if not y_min < y_max:
        raise ValueError(f"need y_min < y_max, got [{y_min}, {y_max}]")
    if n_points < 16:
        raise ValueError(f"n_points must be >= 16, got {n_points}")
    return Grid1D(float(y_min), float(y_max), int(n_points))


def spinor_from_axis(spin_axis, spin_sign: int) -> np.ndarray:
    """Unit eigenspinor of (spin_axis . sigma) with eigenvalue spin_sign.

    The global phase is fixed by making the first nonzero component real
    and positive.
    """
    nx, ny, nz = (float(c) for c in spin_axis)
    theta = np.arccos(np.clip(nz, -1.0, 1.0))
    phi = np.arctan2(ny, nx)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    if spin_sign == +1:
        chi = np.array([c, s * np.exp(1j * phi)], dtype=complex)
    else:
        chi = np.array([-s * np.exp(-1j * phi), c], dtype=complex)
    # phase convention: first component with |.| > tol made real positive
    for comp in chi:
        if abs(comp) > 1e-15:
            chi = chi * (comp.conjugate() / abs(comp))
            break
    return chi


def init_gaussian(grid: Grid1D, spec: PacketSpec) -> SpinorField:
    """Normalized Gaussian spinor packet on the grid.

    Rejects packets whose center sits closer than 8 sigma_y to either grid
    boundary (the tail would contaminate the hard walls).
    """
    if spec.y0 - grid.y_min < GAUSSIAN_TAIL_SIGMAS * spec.sigma_y or \
       grid.y_max - spec.y0 < GAUSSIAN_TAIL_SIGMAS * spec.sigma_y:
        raise ValueError(
            f"packet at y0={spec.y0} with sigma_y={spec.sigma_y} needs "
            f">= {GAUSSIAN_TAIL_SIGMAS} sigma_y clearance to both grid edges "
            f"[{grid.y_min}, {grid.y_max}]")
    y = grid.nodes
    envelope = (2.0 * np.pi * spec.sigma_y**2) ** (-0.25) * np.exp(
        -((y - spec.y0) ** 2) / (4.0 * spec.sigma_y**2) + 1j * spec.k0 * y)
    chi = spinor_from_axis(spec.spin_axis, spec.spin_sign)
    fld = SpinorField(grid, chi[0] * envelope, chi[1] * envelope)
    total = norm(fld, grid.y_min, grid.y_max)
    scale = 1.0 / np.sqrt(total)
    fld.amp_up *= scale
    fld.amp_down *= scale
    return fld


def window_weights(grid: Grid1D, y_lo: float, y_hi: float) -> np.ndarray:
    """Quadrature weights w_j with sum_j w_j f_j = integral over [y_lo, y_hi]
    of the piecewise-linear interpolant of f.

    Interior nodes get weight dy; the cells cut by the window edges get the
    exact partial-cell trapezoid weights, so the rule is exactly additive
    over adjacent windows.
    """
    if not (y_lo < y_hi):
        raise ValueError(f"need y_lo < y_hi, got [{y_lo}, {y_hi}]")
    if y_lo < grid.y_min - 1e-12 * grid.dy or y_hi > grid.y_max + 1e-12 * grid.dy:
        raise ValueError(
            f"window [{y_lo}, {y_hi}] outside grid [{grid.y_min}, {grid.y_max}]")
    dy = grid.dy
    n = grid.n_points
    a = min(max(y_lo, grid.y_min), grid.y_max)
    b = min(max(y_hi, grid.y_min), grid.y_max)
    w = np.zeros(n)
    # cell indices containing the window edges
    ia = min(int((a - grid.y_min) / dy), n - 2)
    ib = min(int((b - grid.y_min) / dy), n - 2)

    def add_cell(j: int, lo: float, hi: float):
        # integral over [lo, hi] of the linear interpolant on cell j
        yj = grid.y_min + j * dy
        yj1 = yj + dy
        w[j] += ((yj1 - lo) ** 2 - (yj1 - hi) ** 2) / (2.0 * dy)
        w[j + 1] += ((hi - yj) ** 2 - (lo - yj) ** 2) / (2.0 * dy)

    if ia == ib:
        add_cell(ia, a, b)
        return w
    add_cell(ia, a, grid.y_min + (ia + 1) * dy)
    add_cell(ib, grid.y_min + ib * dy, b)
    if ib > ia + 1:  # full cells between the two edge cells
        w[ia + 1] += dy / 2.0
        w[ib] += dy / 2.0
        w[ia + 2:ib] += dy
    return w


def norm(field: SpinorField, y_lo: float, y_hi: float) -> float:
    """Probability in [y_lo, y_hi]: window integral of |psi_up|^2 + |psi_down|^2."""
    w = window_weights(field.grid, y_lo, y_hi)
    return float(np.dot(w, field.density()))
