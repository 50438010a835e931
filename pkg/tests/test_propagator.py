import numpy as np
import pytest

from collapsesim.propagator import Hamiltonian, evolve, evolve_step
from collapsesim.state import Grid1D, gaussian_packet, observables


def free_variance(t, width, mass):
    """Exact position variance of the free packet exp(-x^2 / 2 width^2) (hbar = 1)."""
    return width**2 / 2 * (1 + (t / (mass * width**2))**2)


@pytest.fixture
def wide_grid():
    return Grid1D.centered(40.0, 1024)


def test_rejects_bad_dt(grid):
    psi = gaussian_packet(grid, 0, 1)
    with pytest.raises(ValueError):
        evolve_step(psi, Hamiltonian.free(), 0.0)
    with pytest.raises(ValueError):
        evolve(psi, Hamiltonian.free(), -1.0, 0.1)


def test_hamiltonian_validation():
    with pytest.raises(ValueError):
        Hamiltonian.free(0.0)
    with pytest.raises(ValueError):
        Hamiltonian("harmonic", 1.0, 0.0)
    with pytest.raises(ValueError):
        Hamiltonian.tabulated([0.0, np.inf])


@pytest.mark.parametrize("dt", [1e-3, 1e-2])
def test_harmonic_ground_state_is_stationary(dt):
    grid = Grid1D.centered(12.0, 256)
    h = Hamiltonian.harmonic(1.0)
    psi = gaussian_packet(grid, 0.0, 1.0)
    out = evolve_step(psi, h, dt)
    assert out.fidelity(psi) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
def test_free_spreading(wide_grid, t):
    width, mass = 1.2, 1.0
    psi = evolve(gaussian_packet(wide_grid, 0.0, width), Hamiltonian.free(mass), t, 0.01)
    var = observables(psi).position_variance
    assert var == pytest.approx(free_variance(t, width, mass), rel=1e-6)


def test_free_drift(wide_grid):
    p, m, t = 1.5, 2.0, 3.0
    psi = gaussian_packet(wide_grid, -10.0, 1.0, p)
    out = evolve(psi, Hamiltonian.free(m), t, 0.01)
    assert observables(out).mean_position == pytest.approx(-10.0 + p / m * t, abs=1e-8)


def test_unitarity_over_many_steps():
    grid = Grid1D.centered(12.0, 256)
    psi = gaussian_packet(grid, 1.0, 0.8, 0.5)
    h = Hamiltonian.harmonic(1.0)
    out = evolve(psi, h, 100.0, 0.01)  # 1e4 steps
    assert abs(out.norm - 1.0) < 1e-9


def test_evolve_zero_is_identity(grid):
    psi = gaussian_packet(grid, 0.3, 1.0, 0.2)
    assert np.array_equal(evolve(psi, Hamiltonian.harmonic(1.0), 0.0, 0.1).amplitudes, psi.amplitudes)


def test_semigroup():
    grid = Grid1D.centered(12.0, 256)
    h = Hamiltonian.harmonic(1.0)
    psi = gaussian_packet(grid, 1.0, 0.8, 0.5)
    full = evolve(psi, h, 2.0, 0.01)
    halves = evolve(evolve(psi, h, 1.0, 0.01), h, 1.0, 0.01)
    assert np.max(np.abs(full.amplitudes - halves.amplitudes)) < 1e-9


def test_partial_final_step(grid):
    h = Hamiltonian.free()
    psi = gaussian_packet(grid, 0.0, 1.0)
    a = evolve(psi, h, 0.25, 0.1)
    b = evolve(psi, h, 0.25, 0.05)
    # free flow is exact in the split-step scheme regardless of the step
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-12


def test_coherent_state_revival():
    grid = Grid1D.centered(12.0, 256)
    h = Hamiltonian.harmonic(1.0)
    psi = gaussian_packet(grid, 2.0, 1.0)
    out = evolve(psi, h, 2 * np.pi, 1e-3)
    assert out.fidelity(psi) == pytest.approx(1.0, abs=1e-6)


def test_second_order_convergence():
    grid = Grid1D.centered(12.0, 256)
    h = Hamiltonian.harmonic(1.0)
    psi = gaussian_packet(grid, 2.0, 1.0)
    t = 1.3
    exact = 2.0 * np.cos(t)
    errors = [abs(observables(evolve(psi, h, t, dt)).mean_position - exact) for dt in (0.04, 0.02, 0.01)]
    ratios = [errors[0] / errors[1], errors[1] / errors[2]]
    assert ratios == pytest.approx([4.0, 4.0], rel=0.05)


def test_default_dt_phase_bound(grid):
    h = Hamiltonian.free(2.0)
    dt = h.default_dt(grid)
    assert grid.k_max**2 / (2 * h.mass) * dt == pytest.approx(0.1)


def test_tabulated_matches_harmonic():
    grid = Grid1D.centered(12.0, 256)
    psi = gaussian_packet(grid, 1.0, 0.9)
    h1 = Hamiltonian.harmonic(1.3, 0.7)
    h2 = Hamiltonian.tabulated(0.5 * 0.7 * 1.3**2 * grid.x**2, 0.7)
    a, b = evolve(psi, h1, 1.0, 0.01), evolve(psi, h2, 1.0, 0.01)
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-12
