"""Spatial profiles of the Hamiltonian: scalar barrier and spin-coupling term.

Two couplings are supported:
  * larmor_z    : -(omega0/2) sigma_z inside |y| <= D, zero outside
  * rotating_xy : (omega0/2) f(y).sigma with f rotating in the x-y plane,
                  f(y) = (-sin(pi y / 2D), cos(pi y / 2D), 0)  for |y| < D,
                  f(y) = (-sgn(y), 0, 0)                       for D <= |y| <= L,
                  f(y) = 0                                     for |y| > L.

Discontinuous edges are sampled pointwise; a node landing exactly on an edge
takes the inside value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid1D, SIGMA_X, SIGMA_Y, SIGMA_Z


@dataclass(frozen=True)
class PotentialProfile:
    kind: str  # "none" | "rectangular"
    U0: float = 0.0
    half_width: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "rectangular"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "rectangular":
            if self.U0 < 0:
                raise ValueError(f"U0 must be >= 0, got {self.U0}")
            if not self.half_width > 0:
                raise ValueError(f"half_width must be > 0, got {self.half_width}")

    def sample_at(self, y: np.ndarray) -> np.ndarray:
        u = np.zeros_like(y, dtype=float)
        if self.kind == "rectangular":
            u[np.abs(y) <= self.half_width] = self.U0
        return u

    @property
    def support_half_width(self) -> float:
        return self.half_width if self.kind == "rectangular" else 0.0


@dataclass(frozen=True)
class SpinCouplingProfile:
    kind: str  # "none" | "larmor_z" | "rotating_xy"
    omega0: float = 0.0
    D: float = 0.0
    L: float = 0.0  # rotating_xy only; constant-field wings over D <= |y| <= L

    def __post_init__(self):
        if self.kind not in ("none", "larmor_z", "rotating_xy"):
            raise ValueError(f"unknown coupling kind {self.kind!r}")
        if self.kind != "none":
            if self.omega0 < 0:
                raise ValueError(f"omega0 must be >= 0, got {self.omega0}")
            if not self.D > 0:
                raise ValueError(f"D must be > 0, got {self.D}")
        if self.kind == "rotating_xy" and not self.L >= self.D:
            raise ValueError(f"need L >= D, got L={self.L}, D={self.D}")

    @property
    def support_half_width(self) -> float:
        if self.kind == "none":
            return 0.0
        return self.D if self.kind == "larmor_z" else self.L

    def field_direction(self, y: float) -> np.ndarray:
        """Unit field direction at y (zero vector outside the support)."""
        if self.kind == "larmor_z":
            return np.array([0.0, 0.0, -1.0]) if abs(y) <= self.D else np.zeros(3)
        if self.kind == "rotating_xy":
            if abs(y) < self.D:
                arg = np.pi * y / (2.0 * self.D)
                return np.array([-np.sin(arg), np.cos(arg), 0.0])
            if abs(y) <= self.L:
                return np.array([-np.sign(y), 0.0, 0.0])
        return np.zeros(3)

    def sample_at(self, y: np.ndarray) -> np.ndarray:
        """Per-node 2x2 Hermitian coupling matrices, shape (len(y), 2, 2)."""
        h = np.zeros((len(y), 2, 2), dtype=complex)
        if self.kind == "larmor_z":
            inside = np.abs(y) <= self.D
            h[inside] = -(self.omega0 / 2.0) * SIGMA_Z
        elif self.kind == "rotating_xy":
            rot = np.abs(y) < self.D
            arg = np.pi * y[rot] / (2.0 * self.D)
            h[rot] = (self.omega0 / 2.0) * (
                -np.sin(arg)[:, None, None] * SIGMA_X
                + np.cos(arg)[:, None, None] * SIGMA_Y)
            wing = (np.abs(y) >= self.D) & (np.abs(y) <= self.L)
            h[wing] = -(self.omega0 / 2.0) * np.sign(y[wing])[:, None, None] * SIGMA_X
        return h


@dataclass
class DiscretizedHamiltonian:
    """Per-node arrays defining H = k^2/2m + U(y) + h_sf(y) on a grid."""

    grid: Grid1D
    u: np.ndarray       # scalar potential U(y_j), shape (n,)
    h_sf: np.ndarray    # spin coupling, shape (n, 2, 2), Hermitian per node
    mass: float = 1.0


def larmor_profile(omega0: float, D: float) -> SpinCouplingProfile:
    """Precession coupling -(omega0/2) sigma_z confined to |y| <= D."""
    return SpinCouplingProfile("larmor_z", omega0=omega0, D=D)


def rotating_field_profile(omega0: float, D: float, L: float) -> SpinCouplingProfile:
    """In-plane field rotating from +x at y=-D to -x at y=+D, constant wings to |y|=L."""
    return SpinCouplingProfile("rotating_xy", omega0=omega0, D=D, L=L)


def rectangular_barrier(U0: float, half_width: float) -> PotentialProfile:
    return PotentialProfile("rectangular", U0=U0, half_width=half_width)


def free_potential() -> PotentialProfile:
    return PotentialProfile("none")


def no_coupling() -> SpinCouplingProfile:
    return SpinCouplingProfile("none")


def sample(grid: Grid1D, pot: PotentialProfile, sf: SpinCouplingProfile,
           margin: float = 0.0) -> DiscretizedHamiltonian:
    """Sample both profiles onto the grid nodes.

    `margin` is the clearance required between the profiles' support and the
    grid edges (callers pass the packet's 8 sigma_y rule).
    """
    half = max(pot.support_half_width, sf.support_half_width)
    if half > 0 and (-half - margin < grid.y_min or half + margin > grid.y_max):
        raise ValueError(
            f"profile support |y| <= {half} plus margin {margin} does not fit "
            f"inside grid [{grid.y_min}, {grid.y_max}]")
    y = grid.nodes
    return DiscretizedHamiltonian(grid, pot.sample_at(y), sf.sample_at(y))
