"""Core functions."""

import logging

import numpy as np

from .diagnostics import match_states
from .lattice import GridSpec
from .results import PetermannScan
from .solvers import NonlinearSolver, ResonanceSolver

LOGGER = logging.getLogger(__name__)


def solve_resonances(p, grid=None, n_keep=64, **kwargs):
    """Compute the physical Wannier-Stark resonances of one parameter point.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
        Lattice parameters with F > 0 and g = 0.
    grid : None or :obj:`~pywsep.lattice.GridSpec`, optional
        Discretization. Default = ``GridSpec()``.
    n_keep : :obj:`int`, optional
        Number of most stable physical states to keep. Default = 64.
    **kwargs
        Optional keyword arguments to pass onto :obj:`~pywsep.solvers.ResonanceSolver`.

    Returns
    -------
    :obj:`~pywsep.results.SpectrumSlice`
        Labeled resonances sorted by decay rate.
    """
    return ResonanceSolver(grid, n_keep=n_keep, **kwargs).solve(p).summary()


def solve_nonlinear_resonance(p, grid=None, seed=None, **kwargs):
    """Compute a self-consistent Gross-Pitaevskii resonance.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
        Lattice parameters including the interaction ``p.g``.
    grid : None or :obj:`~pywsep.lattice.GridSpec`, optional
        Default = ``GridSpec()``.
    seed : None or :obj:`~pywsep.results.Resonance`, optional
        Linear seed; by default the most stable state of the tracked pair.
    **kwargs
        Optional keyword arguments to pass onto :obj:`~pywsep.solvers.NonlinearSolver`.

    Returns
    -------
    :obj:`~pywsep.results.NonlinearResonance`
    """
    return NonlinearSolver(grid, **kwargs).solve(p, seed=seed).summary()


def tracked_pairs(p, inv_F_values, grid=None, n_jobs=1, tie_tol=1e-3, **kwargs):
    """Follow the tracked pair along a cut in 1/F with identity matching.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
        Template parameters; F is replaced by each cut value.
    inv_F_values : :obj:`numpy.ndarray`
        Monotone 1/F values.
    grid : None or :obj:`~pywsep.lattice.GridSpec`, optional
    n_jobs : :obj:`int`, optional
        Threads for the independent solves. Default = 1.
    tie_tol : :obj:`float`, optional
        Default = 1e-3.
    **kwargs
        Passed to :obj:`~pywsep.solvers.ResonanceSolver`.

    Returns
    -------
    :obj:`list` of :obj:`tuple`
        Identity-matched pair per cut value.
    """
    points = [p.replace(F=1.0 / v) for v in inv_F_values]
    spectra = ResonanceSolver(grid, n_jobs=n_jobs, **kwargs).solve(points).summary()

    pairs = []
    for spectrum in spectra:
        pair = list(spectrum.tracked_pair())
        if pairs:
            order, _, ambiguous = match_states(list(pairs[-1]), pair, tie_tol=tie_tol)
            if ambiguous:
                LOGGER.debug("Ambiguous matching at F=%.6g.", spectrum.params.F)
            pair = [pair[i] for i in order]
        pairs.append(tuple(pair))
    return pairs


def petermann_scan(p, inv_F_values, grid=None, **kwargs):
    """Compute Petermann factors of the linear tracked pair along a cut in 1/F.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
    inv_F_values : :obj:`numpy.ndarray`
    grid : None or :obj:`~pywsep.lattice.GridSpec`, optional
    **kwargs
        Passed to :func:`tracked_pairs`.

    Returns
    -------
    :obj:`~pywsep.results.PetermannScan`
    """
    pairs = tracked_pairs(p, inv_F_values, grid=grid, **kwargs)
    return PetermannScan(
        inv_F_values,
        [a.petermann for a, _ in pairs],
        [b.petermann for _, b in pairs],
        [a.mu for a, _ in pairs],
        [b.mu for _, b in pairs],
    )


def lz_samples(p, inv_F_values, grid=None, **kwargs):
    """Get (F, Gamma) samples of the most stable ladder for a Landau-Zener fit.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
    inv_F_values : :obj:`numpy.ndarray`
    grid : None or :obj:`~pywsep.lattice.GridSpec`, optional
    **kwargs
        Passed to :obj:`~pywsep.solvers.ResonanceSolver`.

    Returns
    -------
    :obj:`numpy.ndarray` of shape (n, 2)
    """
    grid = grid if grid is not None else GridSpec()
    points = [p.replace(F=1.0 / v) for v in inv_F_values]
    spectra = ResonanceSolver(grid, **kwargs).solve(points).summary()
    return np.array([(s.params.F, s[0].gamma) for s in spectra])
