"""Tests for pywsep.lattice."""

import numpy as np
import pytest

from pywsep.lattice import (
    GridSpec,
    LatticeParams,
    build_hamiltonian,
    cap_profile,
    kinetic_matrix,
    potential_value,
    stencil_weights,
)
from pywsep.utils import TWO_PI


def test_potential_value():
    """Test pywsep.lattice.potential_value at known points."""
    assert np.isclose(potential_value(0.0, LatticeParams(delta=1.0, phi=0.0)), 1.0)

    x = np.linspace(-7, 7, 29)
    assert np.allclose(potential_value(x, LatticeParams(delta=0.0)), 0.5 * np.cos(x))

    p = LatticeParams(delta=1.7, phi=-2.2)
    assert np.allclose(potential_value(x + TWO_PI, p), potential_value(x, p), atol=1e-12)


def test_potential_delta_flip():
    """Test that flipping delta equals shifting phi by pi."""
    x = np.linspace(-7, 7, 29)
    a = potential_value(x, LatticeParams(delta=0.8, phi=0.3))
    b = potential_value(x, LatticeParams(delta=-0.8, phi=0.3 + np.pi))
    assert np.allclose(a, b, atol=1e-12)


def test_lattice_params():
    """Test construction and coordinate helpers of LatticeParams."""
    p = LatticeParams.from_inverse_field(4.0, delta=2.0, phi=3 * np.pi / 2)
    assert np.isclose(p.F, 0.25)
    assert np.isclose(p.phi, -np.pi / 2)
    assert np.isclose(p.inv_F, 4.0)
    assert np.allclose(p.triple(), [4.0, 2.0, -np.pi / 2])

    q = p.with_triple([3.0, 1.0, -1.0])
    assert np.allclose(q.triple(), [3.0, 1.0, -1.0])
    assert q.V0 == p.V0

    d = p.to_dict()
    assert set(d) == {"V0", "delta", "phi", "F", "g", "inv_F"}
    assert LatticeParams(F=0.0).inv_F == np.inf


@pytest.mark.parametrize("kwargs", [{"V0": 0.0}, {"V0": -1.0}, {"F": -0.1}])
def test_lattice_params_errors(kwargs):
    """Test that invalid LatticeParams raise ValueError."""
    with pytest.raises(ValueError):
        LatticeParams(**kwargs)


def test_require_field():
    """Test LatticeParams.require_field."""
    LatticeParams(F=0.1).require_field()
    with pytest.raises(ValueError, match="F must be > 0"):
        LatticeParams(F=0.0).require_field()
    with pytest.raises(ValueError):
        LatticeParams.from_inverse_field(0.0)


def test_grid_spec():
    """Test derived quantities of GridSpec."""
    grid = GridSpec(periods_left=3, periods_right=2, points_per_period=16)
    assert grid.n_points == 80
    assert np.isclose(grid.dx, TWO_PI / 16)
    assert np.isclose(grid.x[0], -3 * TWO_PI)
    assert np.isclose(grid.x[-1] + grid.dx, 2 * TWO_PI)
    assert np.isclose(grid.x_cap, -2 * TWO_PI)
    assert grid.cap_mask.sum() == 16
    assert np.allclose(grid.window, (-TWO_PI, TWO_PI))
    assert grid.window[0] == grid.x_cap + TWO_PI
    assert grid.periods_shift(2) == 32

    with pytest.raises(ValueError):
        grid.x[0] = 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"periods_left": 0},
        {"points_per_period": 2},
        {"cap_strength": -1.0},
        {"cap_width": 13.0},
        {"cap_order": 0},
        {"kinetic": "chebyshev"},
        {"stencil_points": 8},
    ],
)
def test_grid_spec_errors(kwargs):
    """Test that invalid GridSpec arguments raise ValueError."""
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_cap_profile():
    """Test the normalized quadratic CAP profile."""
    grid = GridSpec()
    w = grid.cap_length
    points = [grid.x_cap + 1.0, grid.x_cap, grid.x_cap - w, grid.x_cap - 0.5 * w]
    values = cap_profile(points, grid)
    assert np.allclose(values, [0.0, 0.0, 1.0, 0.25])

    cubic = grid.replace(cap_order=3)
    assert np.isclose(cap_profile(cubic.x_cap - 0.5 * w, cubic), 0.125)


def test_stencil_weights():
    """Test central-difference weights of the second derivative."""
    assert np.allclose(stencil_weights(3), [1.0, -2.0, 1.0])
    assert np.allclose(stencil_weights(5), [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12])
    assert np.isclose(stencil_weights(9).sum(), 0.0)


def test_kinetic_three_point():
    """Test the kinetic matrix of the three-point stencil."""
    grid = GridSpec(periods_left=1, periods_right=1, points_per_period=4, kinetic="fd")
    grid = grid.replace(stencil_points=3)
    T = kinetic_matrix(grid)
    assert np.isclose(T[0, 0], 1.0 / grid.dx**2)
    assert np.isclose(T[0, 1], -0.5 / grid.dx**2)
    assert T[0, 2] == 0.0
    assert np.array_equal(T, T.T)


def test_kinetic_spectral_plane_wave(grid):
    """Test that the spectral kinetic matrix is exact on a box eigenmode."""
    k = 3 * TWO_PI / grid.length
    f = np.cos(k * grid.x)
    assert np.allclose(kinetic_matrix(grid) @ f, 0.5 * k**2 * f, atol=1e-9)


def test_kinetic_fd_smooth_function(grid):
    """Test that the nine-point stencil approximates -f''/2 away from the box edges."""
    fd = grid.replace(kinetic="fd")
    k = 3 * TWO_PI / fd.length
    f = np.cos(k * fd.x)
    inner = slice(8, -8)
    assert np.allclose((kinetic_matrix(fd) @ f)[inner], (0.5 * k**2 * f)[inner], atol=1e-8)


def test_kinetic_matrix_cached(grid):
    """Test that equal grids share one cached kinetic matrix."""
    assert kinetic_matrix(grid) is kinetic_matrix(grid.replace())
    assert not kinetic_matrix(grid).flags.writeable


def test_build_hamiltonian_hermitian_limit(grid):
    """Test that the Hamiltonian is real symmetric without CAP and interaction."""
    H = build_hamiltonian(LatticeParams(), grid.replace(cap_strength=0.0))
    assert H.is_real
    assert H.symmetric
    assert H.dimension == grid.n_points


@pytest.mark.parametrize("kinetic", ["spectral", "fd"])
def test_build_hamiltonian_symmetric(grid, kinetic):
    """Test that the Hamiltonian equals its transpose."""
    H = build_hamiltonian(LatticeParams(delta=0.4, phi=-1.0, F=0.3), grid.replace(kinetic=kinetic))
    assert not H.is_real
    assert H.symmetric
    assert np.array_equal(H.entries, H.entries.T)

    diagonal = np.diag(H.entries)
    assert np.all(diagonal.imag[~grid.cap_mask] == 0)
    assert np.all(diagonal.imag[grid.cap_mask][1:] < 0)


def test_build_hamiltonian_density(grid):
    """Test the mean-field term and density validation."""
    p = LatticeParams(g=0.5)
    density = np.linspace(0, 1, grid.n_points)
    H0 = build_hamiltonian(p, grid)
    H1 = build_hamiltonian(p, grid, density)
    assert np.allclose(np.diag(H1.entries - H0.entries), 0.5 * density)

    with pytest.raises(ValueError, match="same length"):
        build_hamiltonian(p, grid, density[:-1])
    with pytest.raises(ValueError, match="nonnegative"):
        build_hamiltonian(p, grid, -density)
