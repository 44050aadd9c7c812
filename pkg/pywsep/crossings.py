"""Classification of crossings between two complex energies along a parameter scan."""

import numpy as np

from .results import CrossingReport


def _crosses(diff, threshold):
    """Check for a sign change or a near-zero value in a sampled difference."""
    sign_change = np.any(diff[:-1] * diff[1:] <= 0)
    return bool(sign_change or np.min(np.abs(diff)) < threshold)


def classify_crossing(F, mu1, mu2, g=0.0, real_threshold=5e-3, imag_threshold=5e-3):
    """Classify how two tracked complex energies cross along a scan in F.

    Parameters
    ----------
    F : :obj:`numpy.ndarray` of shape (n,)
        Strictly monotone field strengths.
    mu1, mu2 : :obj:`numpy.ndarray` of shape (n,)
        Identity-matched complex energies M - i Gamma / 2.
    g : :obj:`float`, optional
        Interaction strength the scan was computed with. Default = 0.
    real_threshold, imag_threshold : :obj:`float`, optional
        Closest approaches of |M_1 - M_2| and |Gamma_1 - Gamma_2| below these count as crossings
        even without a sign change. Default = 5e-3.

    Returns
    -------
    :obj:`~pywsep.results.CrossingReport`
    """
    F = np.asarray(F, dtype=float)
    mu1 = np.asarray(mu1, dtype=complex)
    mu2 = np.asarray(mu2, dtype=complex)
    if not (F.shape == mu1.shape == mu2.shape) or F.ndim != 1 or len(F) < 2:
        raise ValueError("F, mu1 and mu2 must be 1d arrays of equal length >= 2.")
    steps = np.diff(F)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("F must be strictly monotone.")

    d_real = mu1.real - mu2.real
    d_gamma = -2.0 * (mu1.imag - mu2.imag)
    real_cross = _crosses(d_real, real_threshold)
    imag_cross = _crosses(d_gamma, imag_threshold)

    if real_cross and imag_cross:
        kind = "degenerate"
    elif imag_cross:
        kind = "type-I"
    elif real_cross:
        kind = "type-II"
    else:
        kind = "avoided"

    i_real = int(np.argmin(np.abs(d_real)))
    i_imag = int(np.argmin(np.abs(d_gamma)))
    return CrossingReport(
        g=float(g),
        F_range=(float(F.min()), float(F.max())),
        type=kind,
        closest_approach_real=float(np.abs(d_real[i_real])),
        closest_approach_imag=float(np.abs(d_gamma[i_imag])),
        F_closest_real=float(F[i_real]),
        F_closest_imag=float(F[i_imag]),
    )
