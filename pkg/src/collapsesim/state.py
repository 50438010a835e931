"""Wave functions on a periodic uniform 1D grid and their observables.

All quantities are in internal units with hbar = 1. The grid is periodic
(spectral derivatives), so states must keep their support away from the
edges of the box.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ResolutionError(ValueError):
    """A length scale is not resolved by the grid spacing."""


class ZeroStateError(ValueError):
    """An operation produced the zero vector, which cannot be normalized."""


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        n = self.n_points
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 8, got {n}")

    @classmethod
    def centered(cls, half_width: float, n_points: int) -> "Grid1D":
        return cls(-half_width, half_width, n_points)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        """Angular wave numbers in FFT order (equal to momenta for hbar = 1)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @property
    def k_max(self) -> float:
        return np.pi / self.dx


@dataclass(eq=False)
class WaveFunction:
    grid: Grid1D
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        self.amplitudes = amps

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.density) * self.grid.dx))

    def normalized(self) -> "WaveFunction":
        n = self.norm
        if not n > 0:
            raise ZeroStateError("cannot normalize the zero vector")
        return WaveFunction(self.grid, self.amplitudes / n)

    def overlap(self, other: "WaveFunction") -> complex:
        """Inner product <self|other>."""
        _check_same_grid(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.grid.dx)

    def fidelity(self, other: "WaveFunction") -> float:
        return abs(self.overlap(other))

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.amplitudes.copy())


@dataclass(frozen=True)
class ObservableSet:
    norm: float
    mean_position: float
    mean_momentum: float
    position_variance: float
    energy: float


def _check_same_grid(a: WaveFunction, b: WaveFunction):
    if a.grid != b.grid:
        raise ValueError("wave functions live on different grids")


def gaussian_packet(grid: Grid1D, center: float, width: float, momentum: float = 0.0) -> WaveFunction:
    """Normalized packet ``exp(-(x-c)**2 / (2 width**2) + i p x)``.

    With this convention the position variance is ``width**2 / 2``.
    """
    if not width > 2.0 * grid.dx:
        raise ResolutionError(f"width {width} under-resolved by dx = {grid.dx}")
    if center - 6.0 * width <= grid.x_min or center + 6.0 * width >= grid.x_max:
        raise ValueError("packet support must lie well inside the grid")
    x = grid.x
    amps = np.exp(-((x - center) ** 2) / (2.0 * width**2) + 1j * momentum * (x - center))
    return WaveFunction(grid, amps).normalized()


def superpose(a: WaveFunction, b: WaveFunction, ca: complex = 1.0, cb: complex = 1.0) -> WaveFunction:
    """Normalized ``ca * a + cb * b``."""
    _check_same_grid(a, b)
    amps = ca * a.amplitudes + cb * b.amplitudes
    scale = abs(ca) * a.norm + abs(cb) * b.norm
    out = WaveFunction(a.grid, amps)
    if not out.norm > 1e-12 * scale:
        raise ZeroStateError("superposition cancels to the zero vector")
    return out.normalized()


def moments(amps: np.ndarray, grid: Grid1D, mass: float = 1.0, potential: np.ndarray | None = None) -> dict:
    """Observables of one state or a stack of states (leading batch axes).

    Returns a dict of arrays keyed like :class:`ObservableSet`. Expectation
    values are normalized by the state norm.
    """
    x = grid.x
    k = grid.k
    rho = np.abs(amps) ** 2
    norm2 = np.sum(rho, axis=-1) * grid.dx
    mean_x = np.sum(rho * x, axis=-1) * grid.dx / norm2
    var_x = np.sum(rho * (x - mean_x[..., None]) ** 2, axis=-1) * grid.dx / norm2
    rho_k = np.abs(np.fft.fft(amps, axis=-1)) ** 2
    total_k = np.sum(rho_k, axis=-1)
    mean_p = np.sum(rho_k * k, axis=-1) / total_k
    energy = np.sum(rho_k * k**2, axis=-1) / total_k / (2.0 * mass)
    if potential is not None:
        energy = energy + np.sum(rho * potential, axis=-1) * grid.dx / norm2
    return {
        "norm": np.sqrt(norm2),
        "mean_position": mean_x,
        "mean_momentum": mean_p,
        "position_variance": var_x,
        "energy": energy,
    }


def observables(psi: WaveFunction, hamiltonian=None) -> ObservableSet:
    """Norm, position and momentum moments, and energy of ``psi``.

    Kinetic energy is evaluated spectrally. Without a Hamiltonian the energy
    is the kinetic energy of a unit-mass particle.
    """
    if hamiltonian is None:
        mass, potential = 1.0, None
    else:
        mass, potential = hamiltonian.mass, hamiltonian.potential(psi.grid)
    m = moments(psi.amplitudes, psi.grid, mass, potential)
    return ObservableSet(**{key: float(val) for key, val in m.items()})


def save_state(psi: WaveFunction, path, binary: bool = False):
    """Write columns x, Re(psi), Im(psi); ``.npy`` array of shape (n, 3) when binary."""
    table = np.column_stack([psi.grid.x, psi.amplitudes.real, psi.amplitudes.imag])
    path = Path(path)
    if binary:
        np.save(path, table)
    else:
        header = f"x re_psi im_psi  x_min={psi.grid.x_min!r} x_max={psi.grid.x_max!r} n_points={psi.grid.n_points}"
        np.savetxt(path, table, fmt="%.17e", header=header)


def load_state(path, binary: bool | None = None) -> WaveFunction:
    path = Path(path)
    if binary is None:
        binary = path.suffix == ".npy"
    table = np.load(path) if binary else np.loadtxt(path)
    x = table[:, 0]
    n = len(x)
    dx = (x[-1] - x[0]) / (n - 1)
    grid = Grid1D(float(x[0]), float(x[0] + n * dx), n)
    return WaveFunction(grid, table[:, 1] + 1j * table[:, 2])
