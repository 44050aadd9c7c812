"""Tests for pywsep.bands."""

import numpy as np
import pytest

from pywsep.bands import bloch_bands, bloch_gap
from pywsep.lattice import LatticeParams


def test_bloch_bands_methods_agree():
    """Test that plane-wave and real-space bands agree."""
    p = LatticeParams(delta=1.0, phi=-2.0)
    q = [-0.5, -0.2, 0.0, 0.3, 0.5]
    pw = bloch_bands(p, q, n_bands=3)
    rs = bloch_bands(p, q, n_bands=3, method="real-space", n_points=128)
    assert pw.shape == rs.shape == (5, 3)
    assert np.allclose(pw, rs, atol=1e-6)


def test_bloch_bands_symmetric_in_q():
    """Test that the bands are even in the quasimomentum."""
    p = LatticeParams(delta=0.7, phi=0.4)
    q = np.linspace(0.05, 0.45, 5)
    assert np.allclose(bloch_bands(p, q), bloch_bands(p, -q))


def test_bloch_gap_weak_lattice():
    """Test that a weak lattice opens a gap of V0/2 at the zone edge."""
    p = LatticeParams(V0=0.002, delta=0.0)
    assert np.isclose(bloch_gap(p), 0.001, rtol=0.02)

    bands = bloch_bands(p, 0.0, n_bands=2)
    # free-particle energies 0 and 1/2 at q = 0
    assert np.allclose(bands[0], [0.0, 0.5], atol=1e-3)


def test_bloch_gap_ignores_field():
    """Test that the gap is computed at F = 0 whatever the field."""
    p = LatticeParams(delta=1.0, phi=-2.991)
    assert bloch_gap(p) > 0
    assert bloch_gap(p) == bloch_gap(p.replace(F=0.5, g=1.0))


def test_bloch_bands_bad_method():
    """Test that unknown methods raise ValueError."""
    with pytest.raises(ValueError, match="method"):
        bloch_bands(LatticeParams(), 0.0, method="tight-binding")
