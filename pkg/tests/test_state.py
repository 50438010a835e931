import numpy as np
import pytest
from scipy.integrate import quad

from collapsesim.propagator import Hamiltonian
from collapsesim.state import (Grid1D, ResolutionError, WaveFunction, ZeroStateError, gaussian_packet,
                               load_state, observables, save_state, superpose)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(0, 1, 100)
    with pytest.raises(ValueError):
        Grid1D(0, 1, 4)
    with pytest.raises(ValueError):
        Grid1D(1, 0, 64)
    g = Grid1D(-1, 1, 64)
    assert g.dx == pytest.approx(2 / 64)


@pytest.mark.parametrize("center, width, p", [(0.0, 1.0, 0.0), (2.5, 0.7, 1.3), (-3.0, 1.5, -2.0)])
def test_packet_moments(grid, center, width, p):
    psi = gaussian_packet(grid, center, width, p)
    obs = observables(psi)
    assert psi.norm == pytest.approx(1.0, abs=1e-12)
    assert obs.mean_position == pytest.approx(center, abs=1e-10)
    assert obs.mean_momentum == pytest.approx(p, abs=1e-10)


def test_packet_variance_against_quadrature(grid):
    width = 1.3
    psi = gaussian_packet(grid, 0.0, width)
    dens = lambda x: np.exp(-x**2 / width**2)
    norm = quad(dens, -np.inf, np.inf)[0]
    var = quad(lambda x: x**2 * dens(x), -np.inf, np.inf)[0] / norm
    assert var == pytest.approx(width**2 / 2, rel=1e-12)
    assert observables(psi).position_variance == pytest.approx(var, abs=1e-10)


def test_under_resolved_packet(grid):
    with pytest.raises(ResolutionError):
        gaussian_packet(grid, 0.0, 1.5 * grid.dx)


def test_packet_near_edge_rejected(grid):
    with pytest.raises(ValueError):
        gaussian_packet(grid, 15.0, 1.0)


def test_superpose(grid):
    psi = gaussian_packet(grid, 1.0, 0.8, 0.5)
    same = superpose(psi, psi, 1, 1)
    assert np.allclose(same.amplitudes, psi.amplitudes, atol=1e-14)
    with pytest.raises(ZeroStateError):
        superpose(psi, psi, 1, -1)


def test_symmetric_superposition_splits_evenly(cat_state):
    x = cat_state.grid.x
    right = np.sum(cat_state.density[x > 0]) * cat_state.grid.dx
    assert right == pytest.approx(0.5, abs=1e-10)


def test_grid_mismatch(grid):
    other = Grid1D.centered(8.0, 256)
    with pytest.raises(ValueError):
        superpose(gaussian_packet(grid, 0, 1), gaussian_packet(other, 0, 1))


def test_harmonic_ground_state_energy():
    grid = Grid1D.centered(12.0, 256)
    h = Hamiltonian.harmonic(1.0, 1.0)
    psi = gaussian_packet(grid, 0.0, 1.0)  # exp(-x^2/2) is the ground state
    assert observables(psi, h).energy == pytest.approx(0.5, abs=1e-8)


def test_free_packet_energy_against_quadrature(grid):
    width, mass = 0.9, 2.0
    psi = gaussian_packet(grid, 0.0, width)
    f = lambda x: np.exp(-x**2 / (2 * width**2))
    df = lambda x: -x / width**2 * f(x)
    oracle = quad(lambda x: df(x)**2, -np.inf, np.inf)[0] / quad(lambda x: f(x)**2, -np.inf, np.inf)[0]
    oracle /= 2 * mass
    assert oracle == pytest.approx(1 / (4 * mass * width**2), rel=1e-12)
    assert observables(psi, Hamiltonian.free(mass)).energy == pytest.approx(oracle, rel=1e-10)


def test_parseval(grid):
    rng = np.random.default_rng(0)
    amps = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
    psi = WaveFunction(grid, amps).normalized()
    phi = np.fft.fft(psi.amplitudes)
    k_norm = np.sum(np.abs(phi)**2) / grid.n_points * grid.dx
    assert k_norm == pytest.approx(1.0, abs=1e-12)
    back = np.fft.ifft(phi)
    assert np.sum(np.abs(back)**2) * grid.dx == pytest.approx(1.0, abs=1e-12)


def test_mixture_variance_matches_quadrature(grid):
    # two co-centred packets of different width: variance is weight-averaged
    a = gaussian_packet(grid, 0.0, 0.6)
    b = gaussian_packet(grid, 0.0, 1.6, 3.0)
    psi = superpose(a, b, 1.0, 1.0)
    x = grid.x
    dens = lambda s: np.abs(np.interp(s, x, psi.amplitudes.real) + 1j * np.interp(s, x, psi.amplitudes.imag))**2
    oracle = np.sum(psi.density * x**2) * grid.dx
    assert observables(psi).position_variance == pytest.approx(oracle, abs=1e-10)
    assert observables(psi).position_variance >= min(0.6**2, 1.6**2) / 2 - 1e-12


def test_non_finite_rejected(grid):
    amps = np.zeros(grid.n_points, complex)
    amps[3] = np.nan
    with pytest.raises(ValueError):
        WaveFunction(grid, amps)


@pytest.mark.parametrize("binary, name", [(False, "psi.txt"), (True, "psi.npy")])
def test_state_dump_round_trip(tmp_path, grid, binary, name):
    psi = gaussian_packet(grid, 1.0, 0.7, 0.4)
    save_state(psi, tmp_path / name, binary=binary)
    back = load_state(tmp_path / name)
    assert back.grid.n_points == grid.n_points
    assert back.grid.x_min == pytest.approx(grid.x_min)
    assert back.grid.dx == pytest.approx(grid.dx, rel=1e-12)
    assert np.allclose(back.amplitudes, psi.amplitudes, atol=1e-15)
    if not binary:
        first = (tmp_path / name).read_text().splitlines()[1].split()
        assert float(first[0]) == grid.x_min
