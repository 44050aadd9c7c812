"""Tests for pywsep.stats."""

import warnings

import numpy as np
import pytest

from pywsep.stats import fit_landau_zener


def test_fit_landau_zener_exact():
    """Test that an exact Landau-Zener trend is recovered."""
    F = np.linspace(0.1, 0.4, 7)
    gamma = F * np.exp(0.5 - 2.0 / F)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fit = fit_landau_zener(np.column_stack([F, gamma]), delta_E=0.8)

    assert np.isclose(fit.slope, -2.0)
    assert np.isclose(fit.intercept, 0.5)
    assert fit.residual < 1e-10
    assert fit.n_samples == 7
    assert np.isclose(fit.expected_slope, -np.pi * 0.64)
    assert set(fit.to_dict()) == {
        "slope",
        "intercept",
        "residual",
        "n_samples",
        "expected_slope",
    }


def test_fit_landau_zener_poor_fit():
    """Test the poor-fit warning for samples with a resonant peak."""
    F = np.linspace(0.1, 0.4, 7)
    gamma = F * np.exp(0.5 - 2.0 / F)
    gamma[3] *= 20.0
    with pytest.warns(UserWarning, match="Poor Landau-Zener fit"):
        fit = fit_landau_zener(list(zip(F, gamma)))
    assert fit.expected_slope is None


@pytest.mark.parametrize(
    "samples",
    [
        np.ones(6),
        np.ones((6, 3)),
        np.ones((3, 2)),
        [(0.1, 1.0), (0.2, 1.0), (0.3, 0.0), (0.4, 1.0), (0.5, 1.0)],
        [(-0.1, 1.0), (0.2, 1.0), (0.3, 1.0), (0.4, 1.0), (0.5, 1.0)],
    ],
)
def test_fit_landau_zener_errors(samples):
    """Test that malformed or nonpositive samples raise ValueError."""
    with pytest.raises(ValueError):
        fit_landau_zener(samples)
