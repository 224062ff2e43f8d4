"""1D spin-1/2 wave-packet simulator with quantum-clock readouts.

Two clock protocols are implemented on top of a norm-preserving
split-step/Crank-Nicolson propagator: a precession clock confined to a
window of the coordinate axis, and a spatially rotating field whose
traversal probes adiabaticity. Experiment presets sweep the dimensionless
knobs (omega0/E0, U0/E0) and write CSV results with analytic overlays.
"""

from .grid import Grid1D, PacketSpec, SpinorField, init_gaussian, make_grid, norm
from .fields import (DiscretizedHamiltonian, PotentialProfile,
                     SpinCouplingProfile, free_potential, larmor_profile,
                     no_coupling, rectangular_barrier, rotating_field_profile,
                     sample)
from .propagator import (EvolveDiagnostics, EvolveParams, NumericalError,
                         Resolution, auto_resolution, evolve, step)
from .observables import (ClockReadout, SpinExpectations, larmor_times,
                          mean_kinetic_energy_transmitted, spin_expectations,
                          spin_flip_probability, transmission_probability)
from .oracles import (BarrierScattering, RabiParams, barrier_transmission,
                      free_flight_time, packet_averaged_larmor_times,
                      packet_averaged_transmission, plane_wave_larmor_times,
                      rabi_flip_probability)

__version__ = "0.1.0"

from .experiments import (ConfigError, ExperimentConfig, NumericsConfig,  # noqa: E402
                          PhysicsConfig, RowResult, SweepConfig, SweepResult,
                          preset, read_config, read_csv, run, write_config,
                          write_csv)
