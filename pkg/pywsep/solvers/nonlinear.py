"""Self-consistent Gross-Pitaevskii resonances on the CAP-discretized Hamiltonian."""

import logging

import numpy as np

from ..diagnostics import c_normalize, match_states, unit_normalize
from ..exceptions import BranchJumpError, ConvergenceError
from ..lattice import GridSpec, build_hamiltonian
from ..results import NonlinearResonance, NonlinearScan
from ..utils import TWO_PI
from .base import BaseSolver
from .linear import ResonanceSolver, diagonalize

LOGGER = logging.getLogger(__name__)


def central_density(psi, grid, site=0):
    """Get |psi|^2 scaled to unit integral over one lattice cell.

    Parameters
    ----------
    psi : :obj:`numpy.ndarray`
    grid : :obj:`~pywsep.lattice.GridSpec`
    site : :obj:`int`, optional
        Cell [2 pi n - pi/2, 2 pi n + 3 pi/2) used for normalization. Default = 0.

    Returns
    -------
    :obj:`numpy.ndarray`
    """
    density = np.abs(psi) ** 2
    lo = TWO_PI * site - 0.5 * np.pi
    cell = (grid.x >= lo) & (grid.x < lo + TWO_PI)
    norm = density[cell].sum() * grid.dx
    if norm == 0:
        raise ValueError(f"State has no weight in cell {site}; cannot normalize its density.")
    return density / norm


def solve_nonlinear(
    p,
    grid,
    seed,
    relaxation=0.3,
    sc_tol=1e-9,
    max_iter=500,
    branch_overlap=0.5,
):
    """Iterate the mean-field eigenproblem to self-consistency.

    Each iteration builds the Hamiltonian with the current density, diagonalizes it, follows
    the eigenpair of maximal overlap with the previous iterate and mixes its density into the
    current one: rho <- (1 - relaxation) rho + relaxation rho_new.

    Parameters
    ----------
    p : :obj:`~pywsep.lattice.LatticeParams`
        Parameters including the interaction strength ``p.g``.
    grid : :obj:`~pywsep.lattice.GridSpec`
    seed : :obj:`~pywsep.results.Resonance`
        Linear resonance at the same parameters (without g) and grid.
    relaxation : :obj:`float`, optional
        Density mixing factor in (0, 1]. Default = 0.3.
    sc_tol : :obj:`float`, optional
        Convergence threshold on the eigenvalue change. Default = 1e-9.
    max_iter : :obj:`int`, optional
        Default = 500.
    branch_overlap : :obj:`float`, optional
        Minimal overlap with the previous iterate. Default = 0.5.

    Returns
    -------
    :obj:`~pywsep.results.NonlinearResonance`
    """
    if not 0 < relaxation <= 1:
        raise ValueError(f"relaxation must lie in (0, 1], got {relaxation}.")
    p.require_field()

    site = seed.site_index
    vector = seed.right_vector
    mu = seed.eigenvalue
    density = central_density(vector, grid, site)

    for iteration in range(1, max_iter + 1):
        H = build_hamiltonian(p, grid, density)
        w, V = diagonalize(H)
        S = np.abs(V.conj().T @ unit_normalize(vector))
        j = int(np.argmax(S))
        if S[j] < branch_overlap:
            raise BranchJumpError(
                f"Nonlinear branch jumped at iteration {iteration}: best overlap with the "
                f"previous iterate is {S[j]:.3f} < {branch_overlap}."
            )

        vector = c_normalize(V[:, j])
        change = abs(w[j] - mu)
        mu = complex(w[j])
        density = (1.0 - relaxation) * density + relaxation * central_density(vector, grid, site)
        LOGGER.debug("iteration %d: mu=%s change=%.3e", iteration, mu, change)

        if change < sc_tol:
            return NonlinearResonance(
                mu=mu,
                density=density,
                right_vector=vector,
                g_used=p.g,
                iterations=iteration,
                residual=float(change),
                site_index=site,
                symmetric=H.symmetric,
            )

    raise ConvergenceError(
        f"Self-consistent iteration did not converge in {max_iter} iterations "
        f"(last change {change:.3e} > {sc_tol}); try a smaller relaxation than {relaxation}."
    )


class NonlinearSolver(BaseSolver):
    """Gross-Pitaevskii resonance solver.

    Parameters
    ----------
    grid : None or :obj:`~pywsep.lattice.GridSpec`, optional
        Default = ``GridSpec()``.
    relaxation : :obj:`float`, optional
        Default = 0.3.
    sc_tol : :obj:`float`, optional
        Default = 1e-9.
    max_iter : :obj:`int`, optional
        Default = 500.
    branch_overlap : :obj:`float`, optional
        Default = 0.5.
    n_jobs : :obj:`int`, optional
        Default = 1.
    **linear_kwargs
        Passed to the :obj:`~pywsep.solvers.ResonanceSolver` that produces seeds.
    """

    def __init__(
        self,
        grid=None,
        relaxation=0.3,
        sc_tol=1e-9,
        max_iter=500,
        branch_overlap=0.5,
        n_jobs=1,
        **linear_kwargs,
    ):
        self.grid = grid if grid is not None else GridSpec()
        self.relaxation = relaxation
        self.sc_tol = sc_tol
        self.max_iter = max_iter
        self.branch_overlap = branch_overlap
        self.n_jobs = n_jobs
        self.linear = ResonanceSolver(self.grid, **linear_kwargs)

    def seed_pair(self, params):
        """Get the tracked linear pair at ``params`` without interaction."""
        return self.linear._solve(params.replace(g=0.0)).tracked_pair()

    def _solve(self, params, seed=None):
        """Solve one parameter point.

        Parameters
        ----------
        params : :obj:`~pywsep.lattice.LatticeParams`
        seed : None or :obj:`~pywsep.results.Resonance`, optional
            Linear seed. Default = the more stable state of the tracked pair.

        Returns
        -------
        :obj:`~pywsep.results.NonlinearResonance`
        """
        if seed is None:
            seed = self.seed_pair(params)[0]
        return solve_nonlinear(
            params,
            self.grid,
            seed,
            relaxation=self.relaxation,
            sc_tol=self.sc_tol,
            max_iter=self.max_iter,
            branch_overlap=self.branch_overlap,
        )

    def scan(self, params, F_values, tie_tol=1e-3):
        """Follow the tracked pair through a sequence of field strengths.

        Points run in the given order; the linear seeds at each field strength are matched to
        the previous nonlinear pair by overlap so that track identities persist.

        Parameters
        ----------
        params : :obj:`~pywsep.lattice.LatticeParams`
            Parameters; ``F`` is replaced by each scan value.
        F_values : :obj:`numpy.ndarray`
            Monotone field strengths.
        tie_tol : :obj:`float`, optional
            Default = 1e-3.

        Returns
        -------
        :obj:`~pywsep.results.NonlinearScan`
        """
        F_values = np.asarray(F_values, dtype=float)
        if np.any(F_values <= 0):
            raise ValueError("All scan field strengths must be > 0.")

        states = []
        previous = None
        for F in F_values:
            point = params.replace(F=F)
            seeds = list(self.seed_pair(point))
            if previous is not None:
                order, _, ambiguous = match_states(previous, seeds, tie_tol=tie_tol)
                if ambiguous:
                    LOGGER.warning("Ambiguous pair matching at F=%.6g; keeping overlap order.", F)
                seeds = [seeds[i] for i in order]

            pair = tuple(self._solve(point, seed=s) for s in seeds)
            previous = [s.right_vector for s in pair]
            states.append(pair)

        return NonlinearScan(F_values, states, params.g)


def nonlinear_petermann_scan(params, grid, F_values, g, **kwargs):
    """Compute Petermann factors of the nonlinear tracked pair along an F scan.

    Parameters
    ----------
    params : :obj:`~pywsep.lattice.LatticeParams`
    grid : :obj:`~pywsep.lattice.GridSpec`
    F_values : :obj:`numpy.ndarray`
    g : :obj:`float`
        Interaction strength.
    **kwargs
        Passed to :obj:`NonlinearSolver`.

    Returns
    -------
    :obj:`~pywsep.results.PetermannScan`
        Petermann factors from the frozen-density operators, with F available as ``.F``.
    """
    solver = NonlinearSolver(grid, **kwargs)
    return solver.scan(params.replace(g=g), F_values).petermann_scan()
