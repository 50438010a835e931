"""Collapse-noise fields on a 1D grid.

Two time structures are supported:

``white``
    delta-correlated in time and space; a slice is the noise averaged over one
    time step, variance ``1 / (dx * dt)`` per cell.
``exponential``
    stationary Ornstein-Uhlenbeck process per cell with time correlation
    ``f(t, s) = (omega_c / 2) * exp(-omega_c * |t - s|)``. The kernel has unit
    time integral, so ``omega_c -> inf`` recovers the white field. A slice is
    the instantaneous field value at the end of the step.

Both kinds also provide :meth:`NoiseField.next_increment`, the exact integral
of the field over the step, which is what the stochastic integrators consume.
Cells are independent; spatial correlation enters through :func:`smear`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import Grid1D, ResolutionError


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    grid: Grid1D
    dt: float
    seed: int = 0
    omega_c: float | None = None

    def __post_init__(self):
        if self.kind not in ("white", "exponential"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.kind == "exponential" and not (self.omega_c is not None and self.omega_c > 0):
            raise ValueError("exponential noise needs omega_c > 0")


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``(seed, stream)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


class NoiseEnsemble:
    """Lockstep noise streams for a batch of trajectories.

    Stream ``i`` is keyed by ``(spec.seed, first_stream + i)`` and yields the
    same numbers as ``NoiseField(spec, stream=first_stream + i)``.
    """

    BLOCK = 256

    def __init__(self, spec: NoiseSpec, n_streams: int = 1, first_stream: int = 0):
        self.spec = spec
        self.streams = list(range(first_stream, first_stream + n_streams))
        self.rngs = [make_rng(spec.seed, s) for s in self.streams]
        self.steps = 0
        grid, dt = spec.grid, spec.dt
        n = grid.n_points
        self._scale = 1.0 / np.sqrt(grid.dx)
        self._draw_shape = (n,) if spec.kind == "white" else (2, n)
        self._buf = np.empty((n_streams, 0) + self._draw_shape)
        self._pos = 0
        if spec.kind == "exponential":
            w = spec.omega_c
            u = w * dt
            one_minus_a = -np.expm1(-u)
            # Exact one-step law of (x, integral of x) for the OU process
            # dx = -w x dt + w dB, stationary variance w/2 per unit dx.
            var_x = -0.5 * w * np.expm1(-2.0 * u)
            cov_xi = 0.5 * one_minus_a**2
            if u < 1e-3:
                var_i = (u**3 / 3 - u**4 / 4 + 7 * u**5 / 60 - u**6 / 24) / w
            else:
                var_i = (u - 2.0 * one_minus_a - 0.5 * np.expm1(-2.0 * u)) / w
            self._a = np.exp(-u)
            self._mean_i = one_minus_a / w
            self._chol = np.linalg.cholesky(np.array([[var_x, cov_xi], [cov_xi, var_i]]))
            self._x = np.stack([rng.standard_normal(n) for rng in self.rngs]) * np.sqrt(0.5 * w)

    def _normals(self):
        # Block draws consume each stream in the same order as per-step draws.
        if self._pos == self._buf.shape[1]:
            shape = (self.BLOCK,) + self._draw_shape
            self._buf = np.stack([rng.standard_normal(shape) for rng in self.rngs])
            self._pos = 0
        z = self._buf[:, self._pos]
        self._pos += 1
        return z

    def _advance(self):
        spec = self.spec
        self.steps += 1
        z = self._normals()
        if spec.kind == "white":
            return z * (self._scale / np.sqrt(spec.dt)), z * (self._scale * np.sqrt(spec.dt))
        noise = np.einsum("ij,sjn->sin", self._chol, z)
        x_old = self._x
        self._x = self._a * x_old + noise[:, 0]
        integral = self._mean_i * x_old + noise[:, 1]
        return self._x * self._scale, integral * self._scale

    def next_slice(self) -> np.ndarray:
        """Field values for the next step, shape ``(n_streams, n_points)``."""
        return self._advance()[0]

    def next_increment(self) -> np.ndarray:
        """Integral of the field over the next step, per stream and cell."""
        return self._advance()[1]


class NoiseField:
    """Stateful single-consumer stream of noise slices for one trajectory."""

    def __init__(self, spec: NoiseSpec, stream: int = 0):
        self.spec = spec
        self.stream = stream
        self._ens = NoiseEnsemble(spec, 1, stream)

    @property
    def steps(self) -> int:
        return self._ens.steps

    def next_slice(self) -> np.ndarray:
        """Field values for the next step (see module docstring)."""
        return self._ens.next_slice()[0]

    def next_increment(self) -> np.ndarray:
        """Integral of the field over the next step, per cell."""
        return self._ens.next_increment()[0]

    def take(self, n_steps: int, increments: bool = False) -> np.ndarray:
        pull = self.next_increment if increments else self.next_slice
        return np.stack([pull() for _ in range(n_steps)])


def gaussian_kernel_1d(x, r_c: float):
    """1D smearing function ``(pi r_c**2)**(-1/4) exp(-x**2 / (2 r_c**2))``."""
    return (np.pi * r_c**2) ** -0.25 * np.exp(-np.asarray(x) ** 2 / (2.0 * r_c**2))


def periodic_offsets(grid: Grid1D) -> np.ndarray:
    """Minimum-image displacement of every cell from cell 0."""
    d = grid.dx * np.arange(grid.n_points)
    return np.where(d > grid.length / 2, d - grid.length, d)


def smear_kernel_fft(grid: Grid1D, r_c: float, kernel=gaussian_kernel_1d) -> np.ndarray:
    if r_c < grid.dx:
        raise ResolutionError(f"r_c = {r_c} is below the grid spacing {grid.dx}")
    return np.fft.fft(kernel(periodic_offsets(grid), r_c)) * grid.dx


def smear(values: np.ndarray, r_c: float, grid: Grid1D) -> np.ndarray:
    """Circular convolution ``integral g1(x - y) values(y) dy`` on the grid.

    Linear in ``values``; leading batch axes are allowed.
    """
    kernel = smear_kernel_fft(grid, r_c)
    return np.fft.ifft(kernel * np.fft.fft(values, axis=-1), axis=-1).real


def colored_time_correlation(t, s, omega_c: float):
    if not omega_c > 0:
        raise ValueError("omega_c must be positive")
    return 0.5 * omega_c * np.exp(-omega_c * np.abs(np.asarray(t) - np.asarray(s)))


def colored_power_fraction(duration: float, omega_c: float) -> float:
    """``(1/T) * double integral of f(t, s)`` over ``[0, T]**2``.

    Fraction of the white-noise effect a colored field delivers within a window
    of length ``T``; tends to 1 for ``omega_c * T >> 1``.
    """
    if np.isinf(omega_c):
        return 1.0
    u = omega_c * duration
    if u < 1e-6:
        return u / 2.0 - u * u / 6.0
    return 1.0 + np.expm1(-u) / u
