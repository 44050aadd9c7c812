"""Fits of decay-rate trends."""

from warnings import warn

import numpy as np

from .results import LandauZenerFit


def fit_landau_zener(samples, delta_E=None, min_samples=5, residual_tol=0.05):
    """Fit the Landau-Zener trend Gamma(F) ~ F exp(-pi dE^2 / F).

    The fit is linear least squares of log(Gamma / F) against 1/F.

    Parameters
    ----------
    samples : :obj:`list` of :obj:`tuple` or :obj:`numpy.ndarray` of shape (n, 2)
        (F, Gamma) pairs with Gamma > 0.
    delta_E : None or :obj:`float`, optional
        Band gap; if given, the expected slope -pi dE^2 is reported alongside.
        Default = None.
    min_samples : :obj:`int`, optional
        Minimum number of samples. Default = 5.
    residual_tol : :obj:`float`, optional
        RMS residual in log(Gamma/F) above which a poor-fit warning is raised.
        Default = 0.05.

    Returns
    -------
    :obj:`~pywsep.results.LandauZenerFit`
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ValueError("samples must be a sequence of (F, Gamma) pairs.")
    if len(samples) < min_samples:
        raise ValueError(f"At least {min_samples} samples are required, got {len(samples)}.")

    F, gamma = samples.T
    if np.any(F <= 0) or np.any(gamma <= 0):
        raise ValueError("All F and Gamma values must be > 0.")

    y = np.log(gamma / F)
    X = np.column_stack([np.ones_like(F), 1.0 / F])
    beta = np.linalg.lstsq(X, y, rcond=None)[0]
    intercept, slope = beta

    resid = y - X.dot(beta)
    rms = float(np.sqrt(np.mean(resid**2)))
    if rms > residual_tol:
        warn(
            f"Poor Landau-Zener fit (RMS residual {rms:.3g}); the samples may straddle a "
            "resonantly enhanced tunneling peak."
        )

    expected = None if delta_E is None else -np.pi * delta_E**2
    return LandauZenerFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=rms,
        n_samples=len(samples),
        expected_slope=expected,
    )
