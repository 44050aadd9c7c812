"""Bloch bands of the untilted bichromatic lattice."""

import numpy as np
from scipy.linalg import eigvalsh

from .lattice import potential_value, stencil_weights
from .utils import TWO_PI

BAND_METHODS = ("plane-wave", "real-space")


def _plane_wave_hamiltonian(p, q, n_waves):
    m = np.arange(-n_waves, n_waves + 1)
    H = np.diag(0.5 * (q + m) ** 2).astype(complex)
    # Fourier components of (V0/2)[cos x + delta cos(2x + phi)]
    c1 = 0.25 * p.V0
    c2 = 0.25 * p.V0 * p.delta * np.exp(1j * p.phi)
    H += np.diag(np.full(2 * n_waves, c1), -1) + np.diag(np.full(2 * n_waves, c1), 1)
    H += np.diag(np.full(2 * n_waves - 1, c2), -2)
    H += np.diag(np.full(2 * n_waves - 1, np.conj(c2)), 2)
    return H


def _real_space_hamiltonian(p, q, n_points, stencil_points):
    dx = TWO_PI / n_points
    x = dx * np.arange(n_points)
    weights = stencil_weights(stencil_points)
    half = stencil_points // 2

    H = np.diag(potential_value(x, p)).astype(complex)
    for j in range(n_points):
        for k, w in zip(range(-half, half + 1), weights):
            col, cell = np.divmod(j + k, n_points)[::-1]
            H[j, col] += -0.5 * w / dx**2 * np.exp(1j * TWO_PI * q * cell)
    return H


def bloch_bands(p, q, n_bands=2, method="plane-wave", n_waves=32, n_points=256, stencil_points=9):
    """Compute the lowest Bloch bands at F = 0.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
        Lattice parameters; ``p.F`` and ``p.g`` are ignored.
    q : :obj:`float` or :obj:`numpy.ndarray`
        Quasimomenta in units of the reciprocal lattice vector, within (-1/2, 1/2].
    n_bands : :obj:`int`, optional
        Default = 2.
    method : {"plane-wave", "real-space"}, optional
        Plane-wave basis e^{i(q+m)x} with |m| <= ``n_waves``, or central differences on one
        period with Bloch-phase boundary conditions. Default = "plane-wave".
    n_waves : :obj:`int`, optional
        Default = 32.
    n_points : :obj:`int`, optional
        Real-space points per period. Default = 256.
    stencil_points : :obj:`int`, optional
        Real-space stencil width. Default = 9.

    Returns
    -------
    :obj:`numpy.ndarray` of shape (len(q), n_bands)
    """
    if method not in BAND_METHODS:
        raise ValueError(f"method must be one of {BAND_METHODS}, got '{method}'.")

    q = np.atleast_1d(np.asarray(q, dtype=float))
    bands = np.empty((len(q), n_bands))
    for i, qi in enumerate(q):
        if method == "plane-wave":
            H = _plane_wave_hamiltonian(p, qi, n_waves)
        else:
            H = _real_space_hamiltonian(p, qi, n_points, stencil_points)
        bands[i] = eigvalsh(H, subset_by_index=[0, n_bands - 1])
    return bands


def bloch_gap(p, n_q=65, **kwargs):
    """Get the minimal direct gap between the two lowest Bloch bands.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
        Evaluated at F = 0 regardless of ``p.F``.
    n_q : :obj:`int`, optional
        Number of quasimomenta on [-1/2, 1/2], both zone edges included. Default = 65.
    **kwargs
        Passed to :func:`bloch_bands`.

    Returns
    -------
    :obj:`float`
    """
    q = np.linspace(-0.5, 0.5, n_q)
    bands = bloch_bands(p, q, n_bands=2, **kwargs)
    return float(np.min(bands[:, 1] - bands[:, 0]))
