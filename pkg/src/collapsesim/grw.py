"""GRW dynamics: Poisson-timed Gaussian localizations between Schrodinger flows.

Multi-particle rigid bodies are treated through the amplified rate ``N * lam``
acting on the centre-of-mass coordinate, so every simulation here is a single
coordinate on a :class:`~collapsesim.state.Grid1D`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .noise import make_rng
from .propagator import Hamiltonian, evolve_amplitudes, step_amplitudes
from .state import Grid1D, WaveFunction, moments

VANISHING_NORM = 1e-300


class VanishingBranchError(ValueError):
    """Localization far outside the support annihilated the state."""


@dataclass(frozen=True)
class CollapseEvent:
    time: float
    center: float


@dataclass
class GrwTrajectory:
    times: np.ndarray
    observables: dict
    events: list
    final_state: WaveFunction
    seed: int
    stream: int = 0
    states: np.ndarray | None = field(default=None, repr=False)

    @property
    def event_counts(self) -> np.ndarray:
        """Number of collapses that happened up to each recorded time."""
        event_times = np.array([e.time for e in self.events])
        return np.searchsorted(event_times, self.times, side="right")


def amplified_rate_grw(n_particles: int, lam: float) -> float:
    """Centre-of-mass collapse rate of a rigid body of ``n_particles``."""
    if n_particles < 1:
        raise ValueError("need at least one particle")
    return n_particles * lam


def decoherence_rate(d: float, rate: float, r_c: float):
    """Decay rate of the coherence between two branches a distance ``d`` apart."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("separation must be non-negative")
    return rate * -np.expm1(-(d**2) / (4.0 * r_c**2))


def localization_operator(x, a: float, r_c: float):
    return (np.pi * r_c**2) ** -0.25 * np.exp(-((np.asarray(x) - a) ** 2) / (2.0 * r_c**2))


def sample_collapse_times(rate: float, t_end: float, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous Poisson process on ``[0, t_end]``."""
    if rate < 0 or not t_end > 0:
        raise ValueError("need rate >= 0 and t_end > 0")
    count = rng.poisson(rate * t_end)
    return np.sort(rng.uniform(0.0, t_end, size=count))


def apply_localization(psi: WaveFunction, a: float, r_c: float) -> WaveFunction:
    amps = psi.amplitudes * localization_operator(psi.grid.x, a, r_c)
    out = WaveFunction(psi.grid, amps)
    if not out.norm > VANISHING_NORM:
        raise VanishingBranchError(f"localization at {a} left norm {out.norm:.3g}")
    return out.normalized()


def collapse_center_density(psi: WaveFunction, r_c: float, a) -> np.ndarray:
    """Probability density ``||L_a psi||**2`` of a collapse centred at ``a``."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    weights = psi.density * psi.grid.dx
    diff = a[:, None] - psi.grid.x[None, :]
    kern = np.exp(-(diff**2) / r_c**2) / np.sqrt(np.pi * r_c**2)
    return kern @ weights


def sample_collapse_center(psi: WaveFunction, r_c: float, rng: np.random.Generator,
                           method: str = "mixture", size: int | None = None):
    """Draw a collapse centre from the Born-weighted density.

    ``mixture`` samples a grid point from ``|psi|**2`` and adds a normal offset
    of standard deviation ``r_c / sqrt(2)``; ``inverse`` inverts the CDF of the
    convolved density evaluated on a fine auxiliary grid. Both sample the same
    law. Returns a float, or an array of ``size`` draws.
    """
    grid = psi.grid
    n = 1 if size is None else size
    if method == "mixture":
        cdf = np.cumsum(psi.density)
        i = np.searchsorted(cdf, rng.uniform(0.0, cdf[-1], n), side="right")
        i = np.minimum(i, grid.n_points - 1)
        out = grid.x[i] + rng.normal(0.0, r_c / np.sqrt(2.0), n)
    elif method == "inverse":
        h = min(grid.dx, r_c / 8.0)
        a = np.arange(grid.x_min - 6 * r_c, grid.x_max + 6 * r_c, h)
        dens = collapse_center_density(psi, r_c, a)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * h)])
        out = np.interp(rng.uniform(0.0, cdf[-1], n), cdf, a)
    else:
        raise ValueError(f"unknown sampling method {method!r}")
    return float(out[0]) if size is None else out


def run_trajectory(psi0: WaveFunction, h: Hamiltonian | None, rate: float, r_c: float,
                   t_end: float, dt: float | None = None, seed: int = 0, stream: int = 0,
                   record_stride: int = 1, keep_states: bool = False) -> GrwTrajectory:
    """Schrodinger evolution interleaved with GRW collapses.

    Time advances on the lattice ``n * dt``; a collapse inside a step splits
    that step at the collapse time. Observables are recorded every
    ``record_stride`` lattice steps and at ``t_end``. ``h=None`` switches off
    the Hamiltonian flow (collapse-only dynamics).
    """
    grid = psi0.grid
    rng = make_rng(seed, stream)
    if dt is None:
        dt = t_end if h is None else h.default_dt(grid)
    event_times = sample_collapse_times(rate, t_end, rng)
    mass = 1.0 if h is None else h.mass
    potential = None if h is None else h.potential(grid)

    def flow(amps, duration):
        if h is None or duration <= 0:
            return amps
        return evolve_amplitudes(amps, h, grid, duration, duration)

    n_full = int(np.floor(t_end / dt + 1e-12))
    boundaries = [k * dt for k in range(n_full + 1)]
    if t_end - boundaries[-1] > 1e-12 * max(dt, t_end):
        boundaries.append(t_end)
    record_idx = set(range(0, len(boundaries), record_stride)) | {len(boundaries) - 1}

    amps = psi0.amplitudes.copy()
    times, records, states, events = [], [], [], []
    ev = 0

    def record(t):
        times.append(t)
        records.append(moments(amps, grid, mass, potential))
        if keep_states:
            states.append(amps.copy())

    record(0.0)
    for j in range(1, len(boundaries)):
        t0, t1 = boundaries[j - 1], boundaries[j]
        t = t0
        split = False
        while ev < len(event_times) and event_times[ev] <= t1:
            te = event_times[ev]
            amps = flow(amps, te - t)
            psi = WaveFunction(grid, amps)
            center = sample_collapse_center(psi, r_c, rng)
            amps = apply_localization(psi, center, r_c).amplitudes
            events.append(CollapseEvent(float(te), center))
            t = te
            ev += 1
            split = True
        if h is not None:
            amps = flow(amps, t1 - t) if split else step_amplitudes(amps, h, grid, t1 - t0)
        if j in record_idx:
            record(t1)

    observables = {key: np.array([r[key] for r in records], dtype=float) for key in records[0]}
    return GrwTrajectory(
        times=np.array(times),
        observables=observables,
        events=events,
        final_state=WaveFunction(grid, amps),
        seed=seed,
        stream=stream,
        states=np.array(states) if keep_states else None,
    )


def run_ensemble(psi0, h, rate, r_c, t_end, n_trajectories, dt=None, seed=0, **kwargs) -> list:
    """Independent trajectories, one Philox stream per trajectory index."""
    return [run_trajectory(psi0, h, rate, r_c, t_end, dt, seed=seed, stream=i, **kwargs)
            for i in range(n_trajectories)]


def offdiagonal_weight(states: np.ndarray, grid: Grid1D, split: float = 0.0) -> float:
    """``integral over x > split, x' < split of |rho(x, x')|`` for the ensemble.

    ``states`` has shape ``(n_trajectories, n_points)``; ``rho`` is the
    ensemble average of ``psi(x) psi*(x')``.
    """
    x = grid.x
    right, left = states[:, x > split], states[:, x < split]
    rho = right.T @ left.conj() / states.shape[0]
    return float(np.sum(np.abs(rho)) * grid.dx**2)


def fit_decay_rate(times, weights) -> float:
    """Least-squares slope of ``-log(weights)`` against time."""
    times = np.asarray(times, dtype=float)
    logw = np.log(np.asarray(weights, dtype=float))
    slope, _ = np.polyfit(times, logw, 1)
    return float(-slope)
