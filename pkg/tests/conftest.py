import numpy as np
import pytest
from hypothesis import settings

from collapsesim.state import Grid1D, gaussian_packet, superpose

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture
def grid():
    return Grid1D.centered(16.0, 512)


@pytest.fixture
def cat_state(grid):
    """Equal superposition of narrow packets at +-10 (r_c = 1 units)."""
    return superpose(gaussian_packet(grid, 10.0, 0.2), gaussian_packet(grid, -10.0, 0.2))


def mass_right(psi, split=0.0):
    rho = psi.density
    return float(np.sum(rho[psi.grid.x > split]) / np.sum(rho))


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the summary is printed at the end of the run."""
    results = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        results.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, [])
    if results:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(results):
            terminalreporter.write_line(line)
