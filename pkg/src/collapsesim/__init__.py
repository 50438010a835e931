"""Simulation and analysis of GRW and CSL wave-function collapse models."""
from .params import (HBAR, K_B, M0, CanonicalPoints, CollapseParams, ParticleSpec, UnitScale,
                     canonical_points, from_dimensionless, to_dimensionless)
from .propagator import Hamiltonian, evolve, evolve_step
from .state import Grid1D, ObservableSet, WaveFunction, gaussian_packet, observables, superpose

__version__ = "0.1.0"
