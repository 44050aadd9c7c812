"""Tests for pywsep.solvers.nonlinear."""

import numpy as np
import pytest

from pywsep import NonlinearSolver
from pywsep.crossings import classify_crossing
from pywsep.exceptions import BranchJumpError, ConvergenceError
from pywsep.lattice import build_hamiltonian
from pywsep.results import NonlinearScan, PetermannScan
from pywsep.solvers import nonlinear_petermann_scan, solve_nonlinear
from pywsep.solvers.linear import diagonalize
from pywsep.solvers.nonlinear import central_density


@pytest.fixture(scope="module")
def seed(spectrum):
    """Get the most stable state of the tracked linear pair."""
    return spectrum.tracked_pair()[0]


def test_central_density(grid, seed):
    """Test that the density integrates to one over the state's cell."""
    density = central_density(seed.right_vector, grid, seed.site_index)
    lo = 2 * np.pi * seed.site_index - 0.5 * np.pi
    cell = (grid.x >= lo) & (grid.x < lo + 2 * np.pi)
    assert np.isclose(density[cell].sum() * grid.dx, 1.0)
    assert np.all(density >= 0)

    far = np.zeros(grid.n_points)
    far[0] = 1.0
    with pytest.raises(ValueError, match="no weight"):
        central_density(far, grid, 0)


def test_solve_nonlinear_linear_limit(grid, off_resonant, seed):
    """Test that g = 0 reproduces the linear resonance in one iteration."""
    res = solve_nonlinear(off_resonant, grid, seed)
    assert res.iterations == 1
    assert np.isclose(res.mu, seed.eigenvalue, atol=1e-10)
    assert res.g_used == 0.0
    assert res.site_index == seed.site_index
    assert np.isclose(res.petermann, seed.petermann)
    assert set(res.to_dict()) >= {"M", "Gamma", "g", "K", "iterations"}


@pytest.mark.parametrize("relaxation", [0.0, 1.5])
def test_solve_nonlinear_relaxation(grid, off_resonant, seed, relaxation):
    """Test that the mixing factor must lie in (0, 1]."""
    with pytest.raises(ValueError, match="relaxation"):
        solve_nonlinear(off_resonant.replace(g=0.1), grid, seed, relaxation=relaxation)


def test_solve_nonlinear_failures(grid, off_resonant, seed):
    """Test the convergence and branch-jump failures."""
    p = off_resonant.replace(g=0.1)
    with pytest.raises(ConvergenceError, match="did not converge"):
        solve_nonlinear(p, grid, seed, max_iter=1)
    with pytest.raises(BranchJumpError, match="jumped"):
        solve_nonlinear(p, grid, seed, branch_overlap=1.1)


def test_nonlinear_solver(grid, off_resonant):
    """Test the solver interface with a weak interaction."""
    solver = NonlinearSolver(grid)
    res = solver.solve(off_resonant.replace(g=0.05)).summary()
    linear = solver.seed_pair(off_resonant)[0]
    assert res.g_used == 0.05
    assert res.iterations > 1
    assert res.residual < solver.sc_tol
    # a repulsive interaction raises the chemical potential
    assert res.mu.real > linear.eigenvalue.real


def test_nonlinear_scan(grid, off_resonant):
    """Test a short scan in F."""
    solver = NonlinearSolver(grid)
    F = [0.2, 0.21, 0.22]
    scan = solver.scan(off_resonant.replace(g=0.05), F)
    assert isinstance(scan, NonlinearScan)
    assert scan.mu1.shape == scan.mu2.shape == (3,)
    assert np.all(scan.K1 >= 1) and np.all(scan.K2 >= 1)
    assert len(scan.to_records()) == 3
    assert scan.to_df().shape[0] == 3

    with pytest.raises(ValueError, match="> 0"):
        solver.scan(off_resonant, [0.2, 0.0])


def test_nonlinear_petermann_scan(grid, off_resonant):
    """Test the Petermann scan of the nonlinear pair."""
    scan = nonlinear_petermann_scan(off_resonant, grid, [0.2, 0.21], g=0.05)
    assert isinstance(scan, PetermannScan)
    assert scan.g == 0.05
    assert np.allclose(scan.F, [0.2, 0.21])
    assert np.all(scan.K1 >= 1)


def test_self_consistency(grid, off_resonant, seed):
    """Test that the converged state is an eigenstate of the operator built from its density."""
    p = off_resonant.replace(g=0.05)
    res = solve_nonlinear(p, grid, seed, sc_tol=1e-9)
    density = central_density(res.right_vector, grid, res.site_index)
    w, _ = diagonalize(build_hamiltonian(p, grid, density))
    assert np.min(np.abs(w - res.mu)) < 10 * 1e-9


@pytest.mark.slow
def test_weak_interaction_continuity(grid, off_resonant, seed):
    """Test that the chemical potential leaves the linear resonance linearly in g."""
    g = np.array([0.005, 0.01, 0.02])
    shifts = np.array(
        [solve_nonlinear(off_resonant.replace(g=x), grid, seed).mu - seed.eigenvalue for x in g]
    )
    slopes = shifts / g
    assert np.all(np.abs(shifts) > 0)
    assert np.allclose(slopes, slopes[0], rtol=0.1)


@pytest.mark.slow
def test_crossing_flip(grid, coarse_ep1):
    """Test the crossing types of the nonlinear pair through the exceptional point."""
    assert coarse_ep1.certified
    p = coarse_ep1.params
    F = p.F + np.linspace(-0.006, 0.006, 13)
    solver = NonlinearSolver(grid)

    reports, peaks = {}, {}
    for g in (0.0, 0.02, -0.02):
        scan = solver.scan(p.replace(g=g), F)
        reports[g] = classify_crossing(scan.F, scan.mu1, scan.mu2, g=g)
        peaks[g] = scan.petermann_scan().peak(1)[0]

    assert reports[0.0].type == "degenerate"
    assert reports[0.02].type == "type-I"
    assert reports[-0.02].type == "type-II"
    # repulsion moves the Petermann peak to stronger fields, i.e. smaller 1/F
    assert peaks[0.02] < peaks[-0.02]
    assert peaks[0.02] <= peaks[0.0] <= peaks[-0.02]
