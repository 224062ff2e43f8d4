"""Closed-form references used by the acceptance tests and figure overlays.

Everything here is grid-free: stationary transfer-matrix scattering for the
rectangular barrier, the rotating-frame spin-flip formula, free flight time,
and Gauss-Hermite momentum averages over a Gaussian packet. None of it shares
numerical machinery with the time-dependent solver; that independence is the
point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GH_ORDER = 41  # Gauss-Hermite order for momentum averages (recorded in metadata)


@dataclass(frozen=True)
class RabiParams:
    """Rotating-field traversal: coupling omega0, speed v0, rotator half-width D.

    The field direction reverses over a length 2D, so in the frame of a
    particle crossing at v0 it rotates at omega_rot = pi*v0/(2D).
    """

    omega0: float
    v0: float
    D: float

    def __post_init__(self):
        if min(self.omega0, self.v0, self.D) <= 0:
            raise ValueError("omega0, v0, D must all be positive")

    @property
    def omega_rot(self) -> float:
        return np.pi * self.v0 / (2.0 * self.D)

    @property
    def tau_device(self) -> float:
        return 1.0 / self.omega_rot

    @property
    def tau_spin(self) -> float:
        return 1.0 / self.omega0


@dataclass(frozen=True)
class BarrierScattering:
    """Stationary scattering amplitudes for a rectangular barrier.

    t_amp is referenced to free propagation: psi = t_amp * e^{iky} past the
    barrier for an incident e^{iky}, so U_eff = 0 gives t_amp = 1 exactly.
    """

    E: float
    U_eff: float
    half_width: float
    t_amp: complex
    r_amp: complex
    kappa: float  # evanescent decay sqrt(2m(U_eff - E)) when E < U_eff, else 0


def rabi_flip_probability(p: RabiParams) -> float:
    """Spin-flip probability after a half-turn of the rotating field.

    For a spin prepared along the field and the field direction reversing at
    angular rate omega_rot, the flip probability is
    [sin((pi/2) sqrt(1+x^2)) / sqrt(1+x^2)]^2 with x = omega0/omega_rot.
    """
    x = p.omega0 / p.omega_rot
    s = np.sqrt(1.0 + x * x)
    return float((np.sin(0.5 * np.pi * s) / s) ** 2)


def free_flight_time(D: float, v0: float) -> float:
    """Classical traversal time 2D/v0 of the region |y| <= D."""
    if v0 <= 0:
        raise ValueError(f"v0 must be positive, got {v0}")
    return 2.0 * D / v0


def barrier_transmission(E: float, U_eff: float, half_width: float,
                         mass: float = 1.0) -> BarrierScattering:
    """Rectangular-barrier amplitudes, continuous across E = U_eff.

    The interior wavenumber q = sqrt(2m(E-U_eff)) is taken complex, so the
    evanescent branch (E < U_eff) comes out of the same expression; the
    q -> 0 limit is handled through sin(qw)/q = w*sinc(qw/pi).
    """
    if E <= 0:
        raise ValueError(f"need E > 0, got {E}")
    k = np.sqrt(2.0 * mass * E)
    q = np.sqrt(complex(2.0 * mass * (E - U_eff)))
    w = 2.0 * half_width
    sin_over_q = w * np.sinc(q * w / np.pi)  # = sin(qw)/q, exact at q = 0
    denom = np.cos(q * w) - 0.5j * ((k * k + q * q) / k) * sin_over_q
    t = np.exp(-1j * k * w) / denom
    r = t * (-0.5j) * ((k * k - q * q) / k) * sin_over_q
    kappa = float(np.sqrt(2.0 * mass * (U_eff - E))) if E < U_eff else 0.0
    return BarrierScattering(E, U_eff, half_width, complex(t), complex(r), kappa)


def _larmor_times_from_amplitudes(t_up: complex, t_down: complex,
                                  omega0: float) -> tuple[float, float]:
    # Conditional spin expectations of the transmitted spinor (t_up, t_down)
    # for an incident x-polarized wave, then the clock inversion. Kept inline
    # (not shared with the simulator readout) on purpose.
    nrm = abs(t_up) ** 2 + abs(t_down) ** 2
    cross = np.conj(t_up) * t_down
    sx = cross.real / nrm
    sy = cross.imag / nrm
    sz = 0.5 * (abs(t_up) ** 2 - abs(t_down) ** 2) / nrm
    angle = np.arctan2(-sy, sx) % (2.0 * np.pi)
    tau_y = angle / omega0
    tau_z = np.arctan(sz / np.hypot(sx, sy)) / omega0
    return float(tau_y), float(tau_z)


def plane_wave_larmor_times(E0: float, U0: float, omega0: float, D: float
                            ) -> tuple[float, float]:
    """Larmor clock times of a transmitted plane wave.

    The precession coupling is sigma_z-diagonal, so the two spin components
    scatter independently off effective barriers U0 -/+ omega0/2; an incident
    x-polarized wave transmits as (t_up, t_down)/sqrt(2).
    """
    if omega0 <= 0:
        raise ValueError(f"need omega0 > 0, got {omega0}")
    t_up = barrier_transmission(E0, U0 - omega0 / 2.0, D).t_amp
    t_down = barrier_transmission(E0, U0 + omega0 / 2.0, D).t_amp
    return _larmor_times_from_amplitudes(t_up, t_down, omega0)


def momentum_nodes(k0: float, sigma_y: float, order: int = GH_ORDER
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes/weights for averaging over the packet's |phi(k)|^2.

    The packet exp(-(y-y0)^2/4 sigma_y^2 + i k0 y) has momentum density
    proportional to exp(-2 sigma_y^2 (k-k0)^2); weights are normalized to 1.
    """
    x, w = np.polynomial.hermite.hermgauss(order)
    k = k0 + x / (np.sqrt(2.0) * sigma_y)
    if np.any(k <= 0):
        raise ValueError("packet too broad: momentum average reaches k <= 0")
    return k, w / np.sqrt(np.pi)


def packet_averaged_transmission(k0: float, sigma_y: float, U0: float,
                                 omega0: float, half_width: float,
                                 order: int = GH_ORDER) -> float:
    """Momentum-averaged transmission of an x-polarized packet through the
    precession barrier (equal mix of effective barriers U0 -/+ omega0/2)."""
    k, w = momentum_nodes(k0, sigma_y, order)
    total = 0.0
    for ki, wi in zip(k, w):
        E = 0.5 * ki * ki
        t_up = barrier_transmission(E, U0 - omega0 / 2.0, half_width).t_amp
        t_dn = barrier_transmission(E, U0 + omega0 / 2.0, half_width).t_amp
        total += wi * 0.5 * (abs(t_up) ** 2 + abs(t_dn) ** 2)
    return float(total)


def packet_averaged_larmor_times(k0: float, sigma_y: float, U0: float,
                                 omega0: float, half_width: float,
                                 order: int = GH_ORDER) -> tuple[float, float]:
    """Larmor times of the transmitted packet, averaging the spinor density
    matrix over the packet's momentum distribution (modes are orthogonal, so
    the average is incoherent)."""
    k, w = momentum_nodes(k0, sigma_y, order)
    cross = 0.0 + 0.0j
    up_w = 0.0
    dn_w = 0.0
    for ki, wi in zip(k, w):
        E = 0.5 * ki * ki
        t_up = barrier_transmission(E, U0 - omega0 / 2.0, half_width).t_amp
        t_dn = barrier_transmission(E, U0 + omega0 / 2.0, half_width).t_amp
        cross += wi * np.conj(t_up) * t_dn
        up_w += wi * abs(t_up) ** 2
        dn_w += wi * abs(t_dn) ** 2
    nrm = up_w + dn_w
    sx, sy = cross.real / nrm, cross.imag / nrm
    sz = 0.5 * (up_w - dn_w) / nrm
    angle = np.arctan2(-sy, sx) % (2.0 * np.pi)
    return float(angle / omega0), float(np.arctan(sz / np.hypot(sx, sy)) / omega0)
