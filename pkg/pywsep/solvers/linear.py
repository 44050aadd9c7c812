"""Linear Wannier-Stark resonance solver."""

import logging
from warnings import warn

import numpy as np
from scipy.linalg import eig, eigh

from ..diagnostics import site_index, translation_overlap
from ..exceptions import NoPhysicalStatesError, PlateauError
from ..lattice import GridSpec, build_hamiltonian
from ..results import Resonance, SpectrumSlice
from ..utils import TWO_PI
from .base import BaseSolver

LOGGER = logging.getLogger(__name__)


def diagonalize(H):
    """Solve the dense eigenproblem of a Hamiltonian matrix.

    Real (hermitian-limit) matrices go through ``eigh`` so their eigenvalues are exactly real.

    Returns
    -------
    w : :obj:`numpy.ndarray` of shape (N,)
        Complex eigenvalues.
    V : :obj:`numpy.ndarray` of shape (N, N)
        Unit-norm right eigenvectors in columns.
    """
    if H.is_real:
        w, V = eigh(H.entries, check_finite=False)
        return w.astype(complex), V.astype(complex)
    return eig(H.entries, check_finite=False)


def physical_states(
    H,
    n_keep=64,
    leak_threshold=0.5,
    energy_window=4.0,
    residual_tol=1e-8,
    degeneracy_tol=1e-8,
    gamma_floor=1e-10,
):
    """Diagonalize a Hamiltonian and keep the physical resonances.

    A state is physical when its density inside the CAP is below ``leak_threshold``, its
    localization centre lies in the grid's physical window, and its site-reduced energy is at
    most ``energy_window`` V0 above the maximum of the lattice potential.

    Parameters
    ----------
    H : :obj:`~pywsep.lattice.HamiltonianMatrix`
    n_keep : :obj:`int`, optional
        Keep at most this many states with the smallest decay rates. Default = 64.
    leak_threshold : :obj:`float`, optional
        Largest fraction of |psi|^2 inside the CAP. Resonances carry Gamma / (2 eta) of
        CAP-weighted density, so this bounds the decay rates that can be resolved.
        Default = 0.5.
    energy_window : :obj:`float`, optional
        Energies above the potential maximum, in units of V0, still treated as physical.
        Eigenvectors near the grid's momentum cutoff lie far above. Default = 4.
    residual_tol : :obj:`float`, optional
        Eigenpair residual above which a warning is raised. Default = 1e-8.
    degeneracy_tol : :obj:`float`, optional
        Eigenvalue distance below which a state is flagged near-defective. Default = 1e-8.
    gamma_floor : :obj:`float`, optional
        Decay rates below -gamma_floor are unphysical. Default = 1e-10.

    Returns
    -------
    :obj:`list` of :obj:`~pywsep.results.Resonance`
        Unlabeled states sorted by decay rate.
    """
    grid, p = H.grid, H.params
    x = grid.x
    w, V = diagonalize(H)

    density = np.abs(V) ** 2
    leak = density[grid.cap_mask].sum(0) / density.sum(0)
    cnorm = np.sum(V * V, axis=0)
    cnorm[cnorm == 0] = np.finfo(float).tiny
    centers = np.real(np.sum(x[:, None] * V * V, axis=0) / cnorm)
    gamma = -2.0 * w.imag

    # vectorized site_index; NaN centres fail every comparison below
    with np.errstate(invalid="ignore"):
        sites = np.floor((centers + 0.5 * np.pi) / TWO_PI)
    reduced = w.real - TWO_PI * p.F * sites
    ceiling = p.V0 * (0.5 * (1.0 + abs(p.delta)) + energy_window)

    lo, hi = grid.window
    physical = (leak < leak_threshold) & (centers >= lo) & (centers <= hi) & (reduced <= ceiling)
    negative = physical & (gamma < -gamma_floor)
    if np.any(negative):
        warn(f"Discarding {negative.sum()} states with negative decay rates below -{gamma_floor}.")
        physical &= ~negative

    idx = np.flatnonzero(physical)
    if not len(idx):
        raise NoPhysicalStatesError(
            f"No physical states found: every eigenpair leaked more than leak_threshold="
            f"{leak_threshold} into the CAP, lay outside the window {grid.window} or sat more "
            f"than energy_window={energy_window} V0 above the potential."
        )
    idx = idx[np.argsort(gamma[idx], kind="stable")][:n_keep]

    states = []
    for i in idx:
        v = V[:, i]
        residual = np.linalg.norm(H.entries @ v - w[i] * v) / np.linalg.norm(v)
        if residual > residual_tol:
            warn(f"Eigenpair residual {residual:.2e} exceeds tolerance {residual_tol:.0e}.")

        others = np.delete(w, i)
        near_defective = bool(np.min(np.abs(others - w[i])) < degeneracy_tol)
        n = site_index(centers[i])
        states.append(
            Resonance(
                eigenvalue=complex(w[i]),
                energy=float(w[i].real - TWO_PI * p.F * n),
                gamma=float(gamma[i]),
                right_vector=v / np.sqrt(cnorm[i]),
                site_index=n,
                localization_center=float(centers[i]),
                cap_leakage=float(leak[i]),
                residual=float(residual),
                near_defective=near_defective,
                symmetric=H.symmetric,
            )
        )

    return states


def _well(res):
    """Return 0 for the well near 2 pi n and 1 for the well near 2 pi n + pi."""
    return int(res.localization_center - TWO_PI * res.site_index >= 0.5 * np.pi)


def label_ladders(
    s, p, ladder_tol=1e-4, translation_tol=0.9, reference_site=0, halfwidth=1.5
):
    """Assign ladder indices and compute the miniladder offset.

    States are visited outward from ``reference_site`` and, within a site, by increasing decay
    rate. A state joins a ladder when the ladder has no member on its site, its eigenvalue
    matches that of the ladder member on the nearest site shifted by 2 pi F per site, and the
    translated member overlaps with it by more than ``translation_tol``. Ladders with a member
    within one site of ``reference_site`` come first and are numbered by the decay rate of that
    member.

    Parameters
    ----------
    s : :obj:`~pywsep.results.SpectrumSlice`
    p : :obj:`~pywsep.lattice.LatticeParams`
    ladder_tol : :obj:`float`, optional
        Relative eigenvalue tolerance for ladder membership. Default = 1e-4.
    translation_tol : :obj:`float`, optional
        Default = 0.9.
    reference_site : :obj:`int`, optional
        Default = 0.
    halfwidth : :obj:`float`, optional
        Half width, in periods, of the region compared by translation. Default = 1.5.

    Returns
    -------
    :obj:`~pywsep.results.SpectrumSlice`
        A new slice with ``ladder_index``/``ambiguous`` set and ``miniladder_offset`` filled
        when the two lowest ladders sit in different wells.
    """
    order = sorted(
        range(len(s)), key=lambda i: (abs(s[i].site_index - reference_site), s[i].gamma)
    )
    ladders = []
    assignment = {}
    n_ambiguous = 0
    for i in order:
        state = s[i]
        matches = []
        for j, members in enumerate(ladders):
            if any(m.site_index == state.site_index for m in members):
                continue
            rep = min(members, key=lambda m: abs(m.site_index - state.site_index))
            expected = rep.eigenvalue + TWO_PI * p.F * (state.site_index - rep.site_index)
            if abs(state.eigenvalue - expected) > ladder_tol * max(1.0, abs(expected)):
                continue
            if translation_overlap(rep, state, s.grid, halfwidth) < translation_tol:
                continue
            matches.append(j)

        if not matches:
            assignment[i] = len(ladders)
            ladders.append([state])
        elif len(matches) == 1:
            assignment[i] = matches[0]
            ladders[matches[0]].append(state)
        else:
            assignment[i] = None
            n_ambiguous += 1

    if n_ambiguous:
        LOGGER.debug("%d states matched several ladders and were left unlabeled.", n_ambiguous)

    def _rank_key(members):
        nearest = min(members, key=lambda m: abs(m.site_index - reference_site))
        return abs(nearest.site_index - reference_site) > 1, nearest.gamma

    rank = sorted(range(len(ladders)), key=lambda j: _rank_key(ladders[j]))
    alpha = {int(j): k + 1 for k, j in enumerate(rank)}
    labeled = []
    for i, res in enumerate(s):
        j = assignment[i]
        labeled.append(
            res.replace(ladder_index=None if j is None else alpha[j], ambiguous=j is None)
        )

    out = SpectrumSlice(s.params, s.grid, labeled, s.eta_used)
    out.miniladder_offset = _miniladder_offset(out, p, reference_site)
    return out


def _miniladder_offset(s, p, reference_site):
    """Get half the splitting between the two lowest ladders, reduced to one site."""
    first, second = s.ladder(1), s.ladder(2)
    if not (first and second):
        return None
    a = min(first, key=lambda r: abs(r.site_index - reference_site))
    b = min(second, key=lambda r: abs(r.site_index - a.site_index))
    if _well(a) == _well(b):
        return None
    if _well(a) == 1:
        a, b = b, a
    # ladder in the well near 2 pi n sits at +E, the other at -E + pi F
    return 0.5 * (a.energy - b.energy + np.pi * p.F)


class ResonanceSolver(BaseSolver):
    """Complex absorbing potential solver for linear Wannier-Stark resonances.

    Parameters
    ----------
    grid : None or :obj:`~pywsep.lattice.GridSpec`, optional
        Discretization. Default = ``GridSpec()``.
    n_keep : :obj:`int`, optional
        Number of physical states kept per spectrum. Default = 64.
    cap_strength : None or :obj:`float` or "auto", optional
        Overrides ``grid.cap_strength``; "auto" selects it by a plateau scan for every
        parameter point. Default = None.
    leak_threshold : :obj:`float`, optional
        Default = 0.5.
    energy_window : :obj:`float`, optional
        Default = 4.
    residual_tol : :obj:`float`, optional
        Default = 1e-8.
    degeneracy_tol : :obj:`float`, optional
        Default = 1e-8.
    ladder_tol : :obj:`float`, optional
        Default = 1e-4.
    translation_tol : :obj:`float`, optional
        Default = 0.9.
    reference_site : :obj:`int`, optional
        Default = 0.
    n_jobs : :obj:`int`, optional
        Threads used when solving a list of parameter points. Default = 1.

    Notes
    -----
    The left eigenvector of each state is conj(psi); this is exact for the complex-symmetric
    discretizations built by :func:`~pywsep.lattice.build_hamiltonian`.
    """

    def __init__(
        self,
        grid=None,
        n_keep=64,
        cap_strength=None,
        leak_threshold=0.5,
        energy_window=4.0,
        residual_tol=1e-8,
        degeneracy_tol=1e-8,
        ladder_tol=1e-4,
        translation_tol=0.9,
        reference_site=0,
        n_jobs=1,
    ):
        grid = grid if grid is not None else GridSpec()
        if cap_strength is not None and cap_strength != "auto":
            grid = grid.replace(cap_strength=float(cap_strength))
        self.grid = grid
        self.n_keep = n_keep
        self.auto_cap = cap_strength == "auto"
        self.leak_threshold = leak_threshold
        self.energy_window = energy_window
        self.residual_tol = residual_tol
        self.degeneracy_tol = degeneracy_tol
        self.ladder_tol = ladder_tol
        self.translation_tol = translation_tol
        self.reference_site = reference_site
        self.n_jobs = n_jobs

    def _solve(self, params, label=True):
        """Solve one parameter point.

        Parameters
        ----------
        params : :obj:`~pywsep.lattice.LatticeParams`
        label : :obj:`bool`, optional
            Whether to assign ladder labels. Default = True.

        Returns
        -------
        :obj:`~pywsep.results.SpectrumSlice`
        """
        params.require_field()
        if params.g != 0:
            raise ValueError(
                "ResonanceSolver handles the linear problem only (g = 0); "
                "use NonlinearSolver for g != 0."
            )

        grid = self.grid
        if self.auto_cap:
            eta = select_cap_strength(params, grid, leak_threshold=self.leak_threshold)
            grid = grid.replace(cap_strength=eta)

        H = build_hamiltonian(params, grid)
        states = physical_states(
            H,
            n_keep=self.n_keep,
            leak_threshold=self.leak_threshold,
            energy_window=self.energy_window,
            residual_tol=self.residual_tol,
            degeneracy_tol=self.degeneracy_tol,
        )
        spectrum = SpectrumSlice(params, grid, states, grid.cap_strength)
        if label:
            spectrum = label_ladders(
                spectrum,
                params,
                ladder_tol=self.ladder_tol,
                translation_tol=self.translation_tol,
                reference_site=self.reference_site,
            )
        return spectrum


def select_cap_strength(
    p,
    grid,
    eta_range=(0.5, 64.0),
    n_eta=13,
    flatness_tol=0.01,
    leak_threshold=0.5,
    return_flatness=False,
):
    """Choose the CAP strength on the plateau of the smallest decay rate.

    The decay rate of the most stable physical state is computed on a logarithmic grid of
    strengths; the strength with the smallest relative slope |d log Gamma / d log eta| wins.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
    grid : :obj:`~pywsep.lattice.GridSpec`
    eta_range : :obj:`tuple` of :obj:`float`, optional
        Lower and upper strengths of the scan. The lower bound keeps box-bound states with
        vanishing decay rates out of the scan. Default = (0.5, 64).
    n_eta : :obj:`int`, optional
        Default = 13.
    flatness_tol : :obj:`float`, optional
        Largest acceptable relative slope. Default = 0.01.
    leak_threshold : :obj:`float`, optional
        Default = 0.5.
    return_flatness : :obj:`bool`, optional
        Also return the plateau flatness. Default = False.

    Returns
    -------
    eta : :obj:`float`
    flatness : :obj:`float`
        Only returned if ``return_flatness`` is True.
    """
    p.require_field()
    if not 0 < eta_range[0] < eta_range[1]:
        raise ValueError(f"eta_range must be increasing and positive, got {eta_range}.")

    etas = np.geomspace(eta_range[0], eta_range[1], n_eta)
    gammas = np.empty(n_eta)
    for i, eta in enumerate(etas):
        H = build_hamiltonian(p.replace(g=0.0), grid.replace(cap_strength=eta))
        states = physical_states(H, n_keep=1, leak_threshold=leak_threshold, residual_tol=np.inf)
        gammas[i] = states[0].gamma

    slopes = np.abs(np.gradient(np.log(np.abs(gammas) + 1e-300), np.log(etas)))
    best = int(np.argmin(slopes))
    flatness = float(slopes[best])
    LOGGER.info("CAP plateau at eta=%.4g (flatness %.3g).", etas[best], flatness)
    if flatness > flatness_tol:
        raise PlateauError(
            f"No CAP plateau found (flatness {flatness:.3g} > {flatness_tol}); "
            "use a larger box (increase periods_left)."
        )

    eta = float(etas[best])
    return (eta, flatness) if return_flatness else eta
