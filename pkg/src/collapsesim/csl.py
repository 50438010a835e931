"""Single-particle CSL dynamics on a 1D grid plus CSL rate laws.

The mass-density operator acts in first quantization as multiplication by
``m * g1(x - y)``, with the 1D smearing function
``g1(x) = (pi r_c**2)**(-1/4) exp(-x**2 / (2 r_c**2))``. With this amplitude
``integral g1(x - y) g1(x - y') dx = exp(-(y - y')**2 / (4 r_c**2))``, so the
averaged dynamics decoheres exactly like GRW at rate ``lam * (m / m0)**2``:
the folding constant relative to the GRW kernel is one. The profile returned
by :func:`smeared_density` is probability-normalized instead, which differs
from ``g1 * |psi|**2`` by :func:`coupling_fold`.

Simulation inputs are dimensionless (hbar = 1, ``m0`` defaults to 1); the
closed-form heating law accepts SI values.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .noise import NoiseEnsemble, NoiseSpec, gaussian_kernel_1d, periodic_offsets, smear_kernel_fft
from .params import HBAR, M0, CollapseParams
from .propagator import Hamiltonian, step_amplitudes
from .state import Grid1D, ResolutionError, WaveFunction, moments

MAX_RATE_DT = 1e-3
COLORED_NOTE = "colored noise: random-unitary equation valid to first order in lambda"


class NormCollapseError(ValueError):
    pass


@dataclass(frozen=True)
class RigidBodyGeometry:
    """``size`` is the body's linear extent, ``spacing`` the mean nucleon spacing."""

    n_nucleons: int
    size: float
    spacing: float

    def __post_init__(self):
        if self.n_nucleons < 1 or not self.size > 0 or not self.spacing > 0:
            raise ValueError("geometry entries must be positive")


@dataclass(frozen=True, eq=False)
class MassDensityProfile:
    grid: Grid1D
    values: np.ndarray = field(repr=False)

    @property
    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.dx)


def coupling_fold(r_c: float) -> float:
    """``integral g1(x) dx = (4 pi r_c**2)**(1/4)``."""
    return (4.0 * np.pi * r_c**2) ** 0.25


def smeared_density(psi: WaveFunction, r_c: float) -> MassDensityProfile:
    """``|psi|**2`` convolved with the unit-mass Gaussian of standard deviation ``r_c``."""
    kernel = smear_kernel_fft(psi.grid, r_c)
    values = np.fft.ifft(kernel * np.fft.fft(psi.density)).real / coupling_fold(r_c)
    return MassDensityProfile(psi.grid, values)


class _CollapseOperator:
    """Precomputed real-FFT kernel of ``g1`` on a grid."""

    def __init__(self, grid: Grid1D, r_c: float):
        if r_c < grid.dx:
            raise ResolutionError(f"r_c = {r_c} is below the grid spacing {grid.dx}")
        self.grid = grid
        g = gaussian_kernel_1d(periodic_offsets(grid), r_c)
        self.kernel = np.fft.rfft(g) * grid.dx
        self.kernel2 = self.kernel**2
        # discrete integral of g1(x)**2 dx; equals 1 up to discretization
        self.g2 = float(np.sum(g**2) * grid.dx)

    def smear(self, values):
        n = self.grid.n_points
        return np.fft.irfft(self.kernel * np.fft.rfft(values, axis=-1), n=n, axis=-1)

    def smear_once_and_twice(self, values):
        n = self.grid.n_points
        f = np.fft.rfft(values, axis=-1)
        return (np.fft.irfft(self.kernel * f, n=n, axis=-1),
                np.fft.irfft(self.kernel2 * f, n=n, axis=-1))


def _coupling(params: CollapseParams, h: Hamiltonian, m0: float) -> float:
    return np.sqrt(params.lam) * h.mass / m0


def nonlinear_update(amps, op: _CollapseOperator, coupling: float, dW, dt: float):
    """Euler-Maruyama increment of the norm-preserving (Ito) collapse equation.

    Works on stacks of states. Returns unnormalized amplitudes.
    """
    dx = op.grid.dx
    rho = np.abs(amps) ** 2
    rho = rho / (np.sum(rho, axis=-1, keepdims=True) * dx)
    # <g1(x - .)> as a function of x, and its own smear
    expect, expect_smeared = op.smear_once_and_twice(rho)
    noise = op.smear(dW) - np.sum(expect * dW, axis=-1, keepdims=True) * dx
    comp = op.g2 - 2.0 * expect_smeared + np.sum(expect**2, axis=-1, keepdims=True) * dx
    return amps * (1.0 + coupling * noise - 0.5 * coupling**2 * comp * dt)


def _renormalize(amps, dx):
    norm = np.sqrt(np.sum(np.abs(amps) ** 2, axis=-1, keepdims=True) * dx)
    if np.any(~np.isfinite(amps)) or np.any(norm < 1e-150):
        raise NormCollapseError("state lost its norm; reduce the time step")
    return amps / norm


def _check_rate(params, h, m0, dt):
    lam_eff = params.lam * (h.mass / m0) ** 2
    if lam_eff * dt > MAX_RATE_DT:
        raise ValueError(f"lam_eff * dt = {lam_eff * dt:.3g} exceeds {MAX_RATE_DT}")


def evolve_nonlinear_step(psi: WaveFunction, h: Hamiltonian, dW, params: CollapseParams,
                          dt: float, m0: float = 1.0) -> WaveFunction:
    """One step of the nonlinear CSL equation.

    ``dW`` is the white-noise increment per cell over the step (variance
    ``dt / dx``), e.g. :meth:`NoiseField.next_increment`. The Hamiltonian part
    is a Strang step; the collapse part is an Euler-Maruyama step followed by
    renormalization.
    """
    _check_rate(params, h, m0, dt)
    op = _CollapseOperator(psi.grid, params.r_c)
    amps = step_amplitudes(psi.amplitudes, h, psi.grid, dt)
    amps = nonlinear_update(amps, op, _coupling(params, h, m0), np.asarray(dW), dt)
    return WaveFunction(psi.grid, _renormalize(amps, psi.grid.dx))


def linear_update(amps, op: _CollapseOperator, coupling: float, dW):
    return amps * np.exp(1j * coupling * op.smear(dW))


def evolve_linear_step(psi: WaveFunction, h: Hamiltonian, dW, params: CollapseParams,
                       dt: float, m0: float = 1.0) -> WaveFunction:
    """One step of the random-unitary equation: a noise phase, then a Strang step.

    ``dW`` is the integral of the (white or colored) noise over the step.
    """
    op = _CollapseOperator(psi.grid, params.r_c)
    amps = linear_update(psi.amplitudes, op, _coupling(params, h, m0), np.asarray(dW))
    return WaveFunction(psi.grid, step_amplitudes(amps, h, psi.grid, dt))


@dataclass
class CslEnsemble:
    """Observables of a batch of trajectories; arrays are ``(n_traj, n_times)``."""

    times: np.ndarray
    observables: dict
    final_states: np.ndarray = field(repr=False)
    grid: Grid1D
    seed: int
    scheme: str
    metadata: dict = field(default_factory=dict)

    def mean(self, key: str) -> np.ndarray:
        return self.observables[key].mean(axis=0)

    def final_state(self, i: int) -> WaveFunction:
        return WaveFunction(self.grid, self.final_states[i])


def run_csl_ensemble(psi0: WaveFunction, h: Hamiltonian, params: CollapseParams, t_end: float,
                     dt: float, n_trajectories: int, seed: int = 0, scheme: str = "linear",
                     noise: str = "white", omega_c: float | None = None, m0: float = 1.0,
                     record_stride: int = 1) -> CslEnsemble:
    """Integrate a batch of CSL trajectories in lockstep.

    Trajectory ``i`` draws its noise from the Philox stream ``(seed, i)``.
    """
    if scheme not in ("linear", "nonlinear"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if scheme == "nonlinear":
        if noise != "white":
            raise ValueError("the nonlinear equation is integrated with white noise only")
        _check_rate(params, h, m0, dt)
    grid = psi0.grid
    kind = "white" if noise == "white" else "exponential"
    spec = NoiseSpec(kind, grid, dt, seed, omega_c)
    field_ = NoiseEnsemble(spec, n_trajectories)
    op = _CollapseOperator(grid, params.r_c)
    coupling = _coupling(params, h, m0)
    potential = h.potential(grid)
    n_steps = int(round(t_end / dt))
    if not np.isclose(n_steps * dt, t_end, rtol=1e-9, atol=0):
        raise ValueError("t_end must be a multiple of dt")

    amps = np.repeat(psi0.amplitudes[None, :], n_trajectories, axis=0)
    times, records = [0.0], [moments(amps, grid, h.mass, potential)]
    for n in range(1, n_steps + 1):
        dW = field_.next_increment()
        if scheme == "linear":
            amps = step_amplitudes(linear_update(amps, op, coupling, dW), h, grid, dt)
        else:
            amps = step_amplitudes(amps, h, grid, dt)
            amps = _renormalize(nonlinear_update(amps, op, coupling, dW, dt), grid.dx)
        if n % record_stride == 0 or n == n_steps:
            times.append(n * dt)
            records.append(moments(amps, grid, h.mass, potential))
    observables = {key: np.stack([r[key] for r in records], axis=1) for key in records[0]}
    metadata = {"noise": noise, "omega_c": omega_c, "m0": m0, "lam": params.lam, "r_c": params.r_c}
    if noise != "white":
        metadata["note"] = COLORED_NOTE
    return CslEnsemble(np.array(times), observables, amps, grid, seed, scheme, metadata)


def csl_amplification(geom: RigidBodyGeometry, lam: float, r_c: float) -> float:
    """Collective collapse rate of a rigid body.

    ``N**2 lam`` when the body fits inside ``r_c``, ``N lam`` when nucleons are
    further apart than ``r_c``, and ``N * n_c * lam`` in between, with ``n_c``
    the number of nucleons in a correlation volume ``r_c**3``.
    """
    n = geom.n_nucleons
    if geom.size <= r_c:
        return n * n * lam
    if geom.spacing >= r_c:
        return n * lam
    n_c = min(max((r_c / geom.spacing) ** 3, 1.0), float(n))
    return n * n_c * lam


def amplification_factor(geom: RigidBodyGeometry, r_c):
    """``csl_amplification / lam`` evaluated over an array of ``r_c``."""
    return np.array([csl_amplification(geom, 1.0, float(r)) for r in np.atleast_1d(r_c)])


def heating_rate(mass: float, params: CollapseParams, m0: float = M0, hbar: float = HBAR) -> float:
    """Energy gain rate ``3 m lam hbar**2 / (4 m0**2 r_c**2)`` of a free particle."""
    return 3.0 * mass * params.lam * hbar**2 / (4.0 * m0**2 * params.r_c**2)


def heating_rate_1d(mass: float, params: CollapseParams, m0: float = M0, hbar: float = HBAR) -> float:
    """One Cartesian degree of freedom: a third of :func:`heating_rate`."""
    return heating_rate(mass, params, m0, hbar) / 3.0


def heating_energy(t, e0: float, mass: float, params: CollapseParams, m0: float = M0,
                   hbar: float = HBAR):
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    return e0 + heating_rate(mass, params, m0, hbar) * np.asarray(t)
