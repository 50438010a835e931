"""Split-step (Strang) spectral propagation of the Schrodinger equation."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .state import Grid1D, WaveFunction

MAX_PHASE_PER_STEP = 0.1


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """``p**2 / 2m + V(x)`` with V free, harmonic or tabulated on the grid."""

    kind: str = "free"
    mass: float = 1.0
    frequency: float = 0.0
    table: np.ndarray | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.kind not in ("free", "harmonic", "tabulated"):
            raise ValueError(f"unknown Hamiltonian kind {self.kind!r}")
        if self.kind == "harmonic" and not self.frequency > 0:
            raise ValueError("harmonic frequency must be positive")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated Hamiltonian needs a potential table")
            table = np.asarray(self.table, dtype=float)
            if not np.all(np.isfinite(table)):
                raise ValueError("tabulated potential must be finite")
            object.__setattr__(self, "table", table)

    @classmethod
    def free(cls, mass: float = 1.0) -> "Hamiltonian":
        return cls("free", mass)

    @classmethod
    def harmonic(cls, frequency: float, mass: float = 1.0) -> "Hamiltonian":
        return cls("harmonic", mass, frequency)

    @classmethod
    def tabulated(cls, potential, mass: float = 1.0) -> "Hamiltonian":
        return cls("tabulated", mass, table=potential)

    def potential(self, grid: Grid1D) -> np.ndarray | None:
        if self.kind == "free":
            return None
        if self.kind == "harmonic":
            return 0.5 * self.mass * self.frequency**2 * grid.x**2
        if self.table.shape != (grid.n_points,):
            raise ValueError("potential table does not match the grid")
        return self.table

    def default_dt(self, grid: Grid1D) -> float:
        """Step at which the kinetic phase at the band edge advances 0.1 rad."""
        return MAX_PHASE_PER_STEP * 2.0 * self.mass / grid.k_max**2


@lru_cache(maxsize=64)
def _kinetic_phase(grid: Grid1D, mass: float, dt: float) -> np.ndarray:
    return np.exp(-0.5j * grid.k**2 / mass * dt)


def _check_dt(dt):
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")


def step_amplitudes(amps: np.ndarray, h: Hamiltonian, grid: Grid1D, dt: float) -> np.ndarray:
    """One Strang step on raw amplitudes; leading batch axes are allowed."""
    potential = h.potential(grid)
    kin = _kinetic_phase(grid, h.mass, dt)
    if potential is None:
        return np.fft.ifft(kin * np.fft.fft(amps, axis=-1), axis=-1)
    half = np.exp(-0.5j * potential * dt)
    out = half * amps
    out = np.fft.ifft(kin * np.fft.fft(out, axis=-1), axis=-1)
    return half * out


def evolve_step(psi: WaveFunction, h: Hamiltonian, dt: float) -> WaveFunction:
    _check_dt(dt)
    return WaveFunction(psi.grid, step_amplitudes(psi.amplitudes, h, psi.grid, dt))


def evolve_amplitudes(amps: np.ndarray, h: Hamiltonian, grid: Grid1D, t_end: float, dt: float) -> np.ndarray:
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    _check_dt(dt)
    n_full = int(np.floor(t_end / dt + 1e-12))
    remainder = t_end - n_full * dt
    if remainder < 1e-12 * max(dt, t_end):
        remainder = 0.0
    for _ in range(n_full):
        amps = step_amplitudes(amps, h, grid, dt)
    if remainder > 0:
        amps = step_amplitudes(amps, h, grid, remainder)
    return amps


def evolve(psi: WaveFunction, h: Hamiltonian, t_end: float, dt: float | None = None) -> WaveFunction:
    """Evolve to ``t_end`` with steps of ``dt`` and a final partial step."""
    if dt is None:
        dt = h.default_dt(psi.grid)
    return WaveFunction(psi.grid, evolve_amplitudes(psi.amplitudes, h, psi.grid, t_end, dt))
