"""Tests for pywsep.diagnostics."""

import numpy as np
import pytest
from scipy.linalg import eig

from pywsep import diagnostics
from pywsep.results import Resonance
from pywsep.utils import TWO_PI


def _gaussian_state(grid, center, symmetric=True):
    """Build a real Gaussian state centred at ``center``."""
    psi = diagnostics.c_normalize(np.exp(-((grid.x - center) ** 2)))
    return Resonance(
        eigenvalue=0j,
        energy=0.0,
        gamma=0.0,
        right_vector=psi,
        site_index=diagnostics.site_index(center),
        localization_center=diagnostics.localization_center(psi, grid.x),
        cap_leakage=0.0,
        residual=0.0,
        symmetric=symmetric,
    )


def test_c_normalize():
    """Test that c-normalized vectors have unit c-norm."""
    rng = np.random.default_rng(1)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    assert np.isclose(np.sum(diagnostics.c_normalize(psi) ** 2), 1.0)

    with pytest.raises(ValueError, match="c-norm"):
        diagnostics.c_normalize([1.0, 1j])
    with pytest.raises(ValueError):
        diagnostics.unit_normalize(np.zeros(3))


def test_overlap():
    """Test overlap identities."""
    a = np.array([1.0, 2.0, -1j])
    assert np.isclose(diagnostics.overlap(a, 2j * a), 1.0)
    assert diagnostics.overlap([1.0, 0.0], [0.0, 1.0]) == 0.0
    assert np.isclose(diagnostics.overlap([1.0, 0.0], [1.0, 1.0]), 1 / np.sqrt(2))

    with pytest.raises(ValueError, match="same length"):
        diagnostics.overlap(a, a[:2])


def test_petermann():
    """Test Petermann factors of real, generic and self-orthogonal vectors."""
    assert np.isclose(diagnostics.petermann(np.array([0.3, -1.0, 2.0])), 1.0)

    rng = np.random.default_rng(2)
    psi = rng.normal(size=10) + 1j * rng.normal(size=10)
    assert diagnostics.petermann(psi) >= 1.0
    # K is invariant under complex rescaling
    assert np.isclose(diagnostics.petermann(psi), diagnostics.petermann((0.2 - 3j) * psi))

    K, saturated = diagnostics.petermann(np.array([1.0, 1j]), return_flag=True)
    assert K == np.inf
    assert saturated

    K, saturated = diagnostics.petermann(psi, return_flag=True)
    assert np.isfinite(K)
    assert not saturated

    with pytest.raises(ValueError):
        diagnostics.petermann(np.zeros(4))


def test_petermann_requires_symmetry(grid):
    """Test that states of non-symmetric operators are rejected."""
    state = _gaussian_state(grid, 0.0)
    assert np.isclose(state.petermann, 1.0)
    with pytest.raises(ValueError, match="complex-symmetric"):
        diagnostics.petermann(state.replace(symmetric=False))


@pytest.mark.parametrize(
    "center,expected",
    [
        (0.0, 0),
        (np.pi, 0),
        (-0.5 * np.pi, 0),
        (-0.5 * np.pi - 1e-9, -1),
        (1.5 * np.pi, 1),
        (TWO_PI, 1),
        (-TWO_PI, -1),
    ],
)
def test_site_index(center, expected):
    """Test that both wells of one cell map to the same site."""
    assert diagnostics.site_index(center) == expected


def test_localization_center(grid):
    """Test the c-product position expectation."""
    psi = np.zeros(grid.n_points, dtype=complex)
    psi[100] = 1j
    assert np.isclose(diagnostics.localization_center(psi, grid.x), grid.x[100])

    state = _gaussian_state(grid, TWO_PI)
    assert np.isclose(state.localization_center, TWO_PI)
    assert state.site_index == 1


def test_translate_vector(grid):
    """Test shifting a vector by whole lattice periods."""
    psi = np.arange(grid.n_points)
    shifted = diagnostics.translate_vector(psi, grid, 2)
    assert shifted[2 * grid.points_per_period] == 0
    assert np.array_equal(diagnostics.translate_vector(shifted, grid, -2), psi)


def test_translation_overlap(grid):
    """Test that translated copies of a localized state overlap fully."""
    a = _gaussian_state(grid, 0.0)
    b = _gaussian_state(grid, TWO_PI)
    assert np.isclose(diagnostics.translation_overlap(a, b, grid), 1.0)

    c = _gaussian_state(grid, TWO_PI + np.pi)
    assert diagnostics.translation_overlap(a, c, grid) < 0.5


def test_match_states():
    """Test assignment of tracked states to candidates."""
    e = np.eye(3)
    indices, overlaps, ambiguous = diagnostics.match_states([e[0], e[1]], [e[1], e[0], e[2]])
    assert np.array_equal(indices, [1, 0])
    assert np.allclose(overlaps, 1.0)
    assert not ambiguous

    # phase and normalization do not matter
    indices, _, _ = diagnostics.match_states([e[2]], [3 * e[0], -2j * e[2]])
    assert np.array_equal(indices, [1])


def test_match_states_tie():
    """Test that equal overlaps are reported as ambiguous."""
    e = np.eye(2)
    candidates = [e[0] + e[1], e[0] - e[1]]
    _, overlaps, ambiguous = diagnostics.match_states([e[0]], candidates)
    assert np.allclose(overlaps, 1 / np.sqrt(2))
    assert ambiguous

    with pytest.raises(ValueError, match="candidates"):
        diagnostics.match_states([e[0], e[1]], [e[0]])


def test_pair_projector_residual():
    """Test the projector check on eigenvectors of a complex-symmetric matrix."""
    rng = np.random.default_rng(3)
    B = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = B + B.T
    mu, vecs = eig(H)
    assert diagnostics.pair_projector_residual(vecs[:, 0], vecs[:, 1], H) < 1e-8

    a, b = rng.normal(size=6) + 1j * rng.normal(size=6), rng.normal(size=6)
    assert diagnostics.pair_projector_residual(a, b, H) > 1e-6
