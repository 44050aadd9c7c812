"""Data for tests."""

import pytest

from pywsep import GridSpec, LatticeParams, ResonanceSolver, find_ep


@pytest.fixture(scope="package")
def grid():
    """Build a coarse grid that keeps eigensolves fast."""
    return GridSpec(periods_left=6, periods_right=4, points_per_period=32)


@pytest.fixture(scope="package")
def solver(grid):
    """Build a linear solver on the coarse grid."""
    return ResonanceSolver(grid)


@pytest.fixture(scope="package")
def off_resonant():
    """Build a configuration away from any crossing of the two most stable ladders."""
    return LatticeParams.from_inverse_field(5.0, delta=0.5, phi=0.7)


@pytest.fixture(scope="package")
def spectrum(solver, off_resonant):
    """Solve the off-resonant configuration on the coarse grid."""
    return ResonanceSolver(solver.grid).solve(off_resonant).summary()


@pytest.fixture(scope="package")
def ep1():
    """Build the published exceptional point at delta = 1 with the larger field."""
    return LatticeParams.from_inverse_field(3.769, delta=1.0, phi=-2.991)


@pytest.fixture(scope="package")
def coarse_ep1(solver, ep1):
    """Locate the delta = 1 exceptional point on the coarse grid."""
    return find_ep(ep1, frozen="delta", solver=solver)
