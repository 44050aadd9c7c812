"""Exceptional-point search, certification and curve tracing."""

import logging

import numpy as np
import pandas as pd
from scipy.ndimage import minimum_filter
from scipy.optimize import least_squares, minimize

from .diagnostics import match_states, overlap
from .exceptions import ConvergenceError
from .lattice import LatticeParams
from .results import EPCandidate, EPCurve, GapScan
from .solvers import ResonanceSolver
from .utils import _listify

LOGGER = logging.getLogger(__name__)

COORDINATES = ("inv_F", "delta", "phi")

# (lower, upper) per coordinate; phi is periodic and never leaves its domain
DOMAIN = {"inv_F": (0.5, 15.0), "delta": (0.0, 3.0), "phi": (-np.pi, np.pi)}


def _outside(triple):
    """Get how far (1/F, delta) lie outside the search domain (0 inside)."""
    excess = 0.0
    for name, value in zip(COORDINATES[:2], triple[:2]):
        lo, hi = DOMAIN[name]
        excess += max(0.0, lo - value) + max(0.0, value - hi)
    return excess


class GapObjective:
    """Distance |mu_1 - mu_2| between the two most stable resonances of one cell.

    The first evaluation fixes a reference pair of eigenvectors. Later evaluations pick the
    two candidates of maximal overlap with that reference, so a change in ladder ordering
    cannot switch the objective to a different pair. When matching is ambiguous the tracked
    pair of the spectrum is used and ``n_fallbacks`` is incremented.

    Parameters
    ----------
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
        Solver with a fixed grid. Default = ``ResonanceSolver()``.
    tie_tol : :obj:`float`, optional
        Default = 1e-3.
    match_tol : :obj:`float`, optional
        Minimal overlap with the reference pair. Default = 0.5.
    n_candidates : :obj:`int`, optional
        Most stable states of the pair's sites considered for matching. Default = 6.
    follow : :obj:`bool`, optional
        Replace the reference by every matched pair, so that a sequence of neighbouring
        cells is followed by continuity. Default = False.
    """

    def __init__(self, solver=None, tie_tol=1e-3, match_tol=0.5, n_candidates=6, follow=False):
        self.solver = solver if solver is not None else ResonanceSolver()
        self.tie_tol = tie_tol
        self.match_tol = match_tol
        self.n_candidates = n_candidates
        self.follow = follow
        self.reference = None
        self.n_evaluations = 0
        self.n_fallbacks = 0

    def match(self, spectrum):
        """Get the pair of a solved spectrum that matches the reference.

        Parameters
        ----------
        spectrum : :obj:`~pywsep.results.SpectrumSlice`
            Labeled spectrum on the objective's grid.

        Returns
        -------
        :obj:`tuple` of :obj:`~pywsep.results.Resonance`
        """
        pair, fallback = spectrum.tracked_pair(
            reference_site=self.solver.reference_site, return_flag=True
        )

        if self.reference is not None:
            sites = {r.site_index for r in pair}
            candidates = [r for r in spectrum if r.site_index in sites][: self.n_candidates]
            matched = False
            if len(candidates) >= 2:
                idx, S, ambiguous = match_states(self.reference, candidates, tie_tol=self.tie_tol)
                if not ambiguous and np.min(S) >= self.match_tol:
                    pair = (candidates[idx[0]], candidates[idx[1]])
                    matched = True
            fallback = fallback or not matched

        self.n_fallbacks += int(fallback)
        if self.reference is None or self.follow:
            self.reference = [r.right_vector for r in pair]
        return pair

    def pair(self, params):
        """Get the matched pair at ``params``.

        Returns
        -------
        :obj:`tuple` of :obj:`~pywsep.results.Resonance`
        """
        self.n_evaluations += 1
        return self.match(self.solver._solve(params))

    def __call__(self, params):
        a, b = self.pair(params)
        return float(abs(a.eigenvalue - b.eigenvalue))

    def discriminant(self, params):
        """Get (mu_1 - mu_2)^2 as [real, imaginary]; smooth through an exceptional point."""
        a, b = self.pair(params)
        d = (a.eigenvalue - b.eigenvalue) ** 2
        return np.array([d.real, d.imag])


def gap_objective(params, solver=None):
    """Evaluate the complex eigenvalue gap of the tracked pair.

    Parameters
    ----------
    params : :obj:`~pywsep.lattice.LatticeParams`
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
        Default = ``ResonanceSolver()``.

    Returns
    -------
    :obj:`float`
        |mu_1 - mu_2|; symmetric in the two states.
    """
    return GapObjective(solver)(params)


def certify(params, objective, gap_tol=1e-6, overlap_tol=0.999, petermann_tol=1e3, **kwargs):
    """Compute the diagnostics of a candidate exceptional point.

    Parameters
    ----------
    params : :obj:`~pywsep.lattice.LatticeParams`
    objective : :obj:`GapObjective`
    gap_tol, overlap_tol, petermann_tol : :obj:`float`, optional
        Certification thresholds. Defaults = 1e-6, 0.999, 1e3.
    **kwargs
        Extra fields for the :obj:`~pywsep.results.EPCandidate`.

    Returns
    -------
    :obj:`~pywsep.results.EPCandidate`
    """
    a, b = objective.pair(params)
    gap = float(abs(a.eigenvalue - b.eigenvalue))
    S = overlap(a, b)
    K = float(min(a.petermann, b.petermann))
    certified = bool(gap < gap_tol and S > overlap_tol and K > petermann_tol)
    return EPCandidate(
        params=params,
        gap=gap,
        overlap_S=S,
        petermann_min=K,
        certified=certified,
        **kwargs,
    )


def _check_frozen(frozen):
    frozen = _listify(frozen) or []
    unknown = [f for f in frozen if f not in COORDINATES]
    if unknown:
        raise ValueError(f"Unknown frozen coordinates {unknown}; choose from {COORDINATES}.")
    free = [i for i, name in enumerate(COORDINATES) if name not in frozen]
    if not free:
        raise ValueError("At least one coordinate must remain free.")
    return free


def _simplex(x0, edge):
    return np.vstack([x0, x0 + edge * np.eye(len(x0))])


def _polish(objective, template, start, free, x0, xatol, max_nfev=60):
    """Drive the discriminant (mu_1 - mu_2)^2 to zero from ``x0`` by least squares."""
    bounds = [DOMAIN[COORDINATES[i]] if i < 2 else (-np.inf, np.inf) for i in free]
    lo, hi = np.array(bounds).T

    def residual(z):
        t = start.copy()
        t[free] = z
        return objective.discriminant(template.with_triple(t))

    res = least_squares(
        residual,
        np.clip(x0, lo, hi),
        bounds=(lo, hi),
        diff_step=1e-6,
        xtol=min(xatol, 1e-8),
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_nfev,
    )
    return res.x, float(np.sqrt(np.hypot(*res.fun)))


def find_ep(
    guess,
    frozen=None,
    solver=None,
    gap_tol=1e-6,
    overlap_tol=0.999,
    petermann_tol=1e3,
    simplex_edge=0.05,
    xatol=1e-5,
    max_iter=400,
    restarts=1,
    polish=True,
    polish_threshold=1e-2,
):
    """Locate an exceptional point by Nelder-Mead minimization of the eigenvalue gap.

    Parameters
    ----------
    guess : :obj:`~pywsep.lattice.LatticeParams`
        Starting point inside the search domain.
    frozen : None or :obj:`str` or :obj:`list` of :obj:`str`, optional
        Coordinates among "inv_F", "delta", "phi" held at their guess values. Default = None.
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
        Solver with the grid used for the whole search.
    gap_tol, overlap_tol, petermann_tol : :obj:`float`, optional
        Certification thresholds. Defaults = 1e-6, 0.999, 1e3.
    simplex_edge : :obj:`float`, optional
        Initial simplex edge per coordinate. Default = 0.05.
    xatol : :obj:`float`, optional
        Simplex diameter tolerance. Default = 1e-5.
    max_iter : :obj:`int`, optional
        Iterations per simplex run. Default = 400.
    restarts : :obj:`int`, optional
        Restarts from the best vertex when the gap stagnates above ``gap_tol``. Default = 1.
    polish : :obj:`bool`, optional
        Refine the simplex result by a least-squares solve of (mu_1 - mu_2)^2 = 0.
        Default = True.
    polish_threshold : :obj:`float`, optional
        Largest simplex gap that is polished. Default = 1e-2.

    Returns
    -------
    :obj:`~pywsep.results.EPCandidate`
        Uncertified when the simplex settled in a local minimum that is not an EP.

    Notes
    -----
    The gap has a square-root cusp at an EP, so convergence is judged on the simplex diameter
    together with the spread of gap values, never on the objective decrement alone. The
    squared gap is analytic in the parameters, which lets the polishing step converge
    quadratically once the simplex has bracketed the EP.
    """
    free = _check_frozen(frozen)
    start = guess.triple()
    if _outside(start) > 0:
        raise ValueError(f"Guess {tuple(start)} lies outside the search domain {DOMAIN}.")

    objective = GapObjective(solver)
    template = guess.replace(g=0.0)

    def f(z):
        t = start.copy()
        t[free] = z
        excess = _outside(t)
        if excess > 0:
            return 1.0 + excess
        return objective(template.with_triple(t))

    options = {"xatol": xatol, "fatol": gap_tol, "maxiter": max_iter}
    x0 = start[free]
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options=dict(options, initial_simplex=_simplex(x0, simplex_edge)),
    )
    for i_restart in range(restarts):
        if res.fun < gap_tol:
            break
        LOGGER.info("Restarting simplex from best vertex (gap %.3e).", res.fun)
        res = minimize(
            f,
            res.x,
            method="Nelder-Mead",
            options=dict(options, initial_simplex=_simplex(res.x, 0.2 * simplex_edge)),
        )

    x, gap = res.x, float(res.fun)
    if polish and gap_tol <= gap < polish_threshold:
        x_p, gap_p = _polish(objective, template, start, free, x, xatol)
        LOGGER.debug("Polished gap %.3e -> %.3e.", gap, gap_p)
        if gap_p < gap:
            x, gap = x_p, gap_p

    if res.nit >= max_iter and gap >= gap_tol:
        raise ConvergenceError(
            f"Simplex exhausted {max_iter} iterations with gap {gap:.3e} >= {gap_tol}."
        )

    final = start.copy()
    final[free] = x
    candidate = certify(
        template.with_triple(final),
        objective,
        gap_tol=gap_tol,
        overlap_tol=overlap_tol,
        petermann_tol=petermann_tol,
        converged=bool(gap < gap_tol),
        n_evaluations=objective.n_evaluations,
    )
    LOGGER.info(
        "EP candidate at %s: gap=%.3e S=%.6f Kmin=%.3g certified=%s",
        np.round(final, 6),
        candidate.gap,
        candidate.overlap_S,
        candidate.petermann_min,
        candidate.certified,
    )
    return candidate


def perturbed_starts(center, n_starts=10, scale=0.1, seed=0, frozen=None):
    """Draw random starting points at a fixed distance from ``center``.

    Parameters
    ----------
    center : :obj:`~pywsep.lattice.LatticeParams`
    n_starts : :obj:`int`, optional
        Default = 10.
    scale : :obj:`float`, optional
        Euclidean distance of each start from ``center`` in the free coordinates.
        Default = 0.1.
    seed : :obj:`int`, optional
        Seed of :func:`numpy.random.default_rng`. Default = 0.
    frozen : None or :obj:`str` or :obj:`list` of :obj:`str`, optional
        Coordinates left unperturbed. Default = None.

    Returns
    -------
    :obj:`list` of :obj:`~pywsep.lattice.LatticeParams`
        Starts inside the search domain; directions leaving it are redrawn.
    """
    free = _check_frozen(frozen)
    rng = np.random.default_rng(seed)
    base = center.triple()
    starts = []
    while len(starts) < n_starts:
        step = rng.standard_normal(len(free))
        t = base.copy()
        t[free] += scale * step / np.linalg.norm(step)
        if _outside(t) == 0:
            starts.append(center.with_triple(t))
    return starts


def seed_robustness(
    guess,
    n_starts=10,
    scale=0.1,
    seed=0,
    agreement_tol=1e-4,
    frozen=None,
    solver=None,
    **find_kwargs,
):
    """Rerun :func:`find_ep` from random perturbations of a located exceptional point.

    Parameters
    ----------
    guess : :obj:`~pywsep.lattice.LatticeParams`
        Initial guess of the reference search.
    n_starts : :obj:`int`, optional
        Default = 10.
    scale : :obj:`float`, optional
        Distance of the perturbed starts from the reference EP. Default = 0.1.
    seed : :obj:`int`, optional
        Random seed of the perturbations. Default = 0.
    agreement_tol : :obj:`float`, optional
        Largest coordinate difference from the reference EP counted as agreement.
        Default = 1e-4.
    frozen : None or :obj:`str` or :obj:`list` of :obj:`str`, optional
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
    **find_kwargs
        Passed to :func:`find_ep`.

    Returns
    -------
    reference : :obj:`~pywsep.results.EPCandidate`
    df : :obj:`~pandas.DataFrame`
        One row per start with the start and end coordinates, the final gap, whether the run
        certified and its largest coordinate difference from the reference. Runs that exhaust
        the simplex have NaN coordinates.
    """
    solver = solver if solver is not None else ResonanceSolver()
    reference = find_ep(guess, frozen=frozen, solver=solver, **find_kwargs)
    starts = perturbed_starts(reference.params, n_starts, scale, seed, frozen=frozen)

    rows = []
    for start in starts:
        row = dict(zip([f"start_{c}" for c in COORDINATES], start.triple()))
        try:
            candidate = find_ep(start, frozen=frozen, solver=solver, **find_kwargs)
        except ConvergenceError as exc:
            LOGGER.warning("Perturbed start %s failed: %s", np.round(start.triple(), 4), exc)
            row.update({c: np.nan for c in COORDINATES}, gap=np.nan, certified=False)
        else:
            row.update(zip(COORDINATES, candidate.triple))
            row.update(gap=candidate.gap, certified=candidate.certified)
        rows.append(row)

    df = pd.DataFrame(rows)
    df["distance"] = np.abs(df[list(COORDINATES)].values - reference.triple).max(axis=1)
    df["agrees"] = df["distance"] < agreement_tol
    LOGGER.info(
        "%d of %d perturbed starts returned to the reference EP.", df["agrees"].sum(), len(df)
    )
    return reference, df


def _to_angles(direction):
    """Convert a unit direction in (1/F, delta, phi) to shell angles (theta, varphi)."""
    x, y, z = direction
    return np.array([np.arccos(np.clip(z, -1.0, 1.0)), np.arctan2(y, x)])


def _from_angles(angles):
    """Convert shell angles to a unit direction in (1/F, delta, phi)."""
    theta, varphi = angles
    return np.array(
        [np.sin(theta) * np.cos(varphi), np.sin(theta) * np.sin(varphi), np.cos(theta)]
    )


def _shell_minimum(center, radius, direction, objective, template, gap_tol, max_iter):
    """Minimize the gap over a sphere around ``center``, starting along ``direction``."""

    def f(angles):
        d = _from_angles(angles)
        excess = _outside(center + radius * d)
        if excess > 0:
            return 1.0 + excess
        penalty = 0.0
        if direction is not None and np.dot(d, direction) <= 0:
            penalty = 1.0 - np.dot(d, direction)
        return objective(template.with_triple(center + radius * d)) + penalty

    x0 = _to_angles(direction)
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": _simplex(x0, 0.2),
            "xatol": 1e-9,
            "fatol": gap_tol,
            "maxiter": max_iter,
        },
    )
    return _from_angles(res.x)


def _initial_directions():
    eye = np.eye(3)
    return [s * v for v in eye for s in (1.0, -1.0)]


def trace_ep_curve(
    start,
    r=0.1,
    max_points=200,
    solver=None,
    direction=None,
    stop_at_fold=False,
    min_radius_factor=0.125,
    gap_tol=1e-6,
    overlap_tol=0.999,
    petermann_tol=1e3,
    max_iter=400,
):
    """Trace the curve of exceptional points by spherical-shell continuation.

    Each new point minimizes the gap on the sphere of radius ``r`` around the last point, in
    coordinates d(1/F) = r sin(theta) cos(varphi), d(delta) = r sin(theta) sin(varphi),
    d(phi) = r cos(theta). Directions pointing back (non-positive dot product with the previous
    step) are penalized, so the trace never backtracks. A shell that fails to certify is retried
    with half the radius, down to ``min_radius_factor * r``.

    Parameters
    ----------
    start : :obj:`~pywsep.results.EPCandidate`
        Certified starting point.
    r : :obj:`float`, optional
        Shell radius in the Euclidean (1/F, delta, phi) metric. Default = 0.1.
    max_points : :obj:`int`, optional
        Default = 200.
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
    direction : None or array-like of shape (3,), optional
        Initial direction. By default the six coordinate axes are tried and the first certified
        shell minimum is used.
    stop_at_fold : :obj:`bool`, optional
        Terminate when the delta component of consecutive steps reverses. Default = False.
    min_radius_factor : :obj:`float`, optional
        Default = 0.125.
    gap_tol, overlap_tol, petermann_tol : :obj:`float`, optional
        Certification thresholds. Defaults = 1e-6, 0.999, 1e3.
    max_iter : :obj:`int`, optional
        Iterations per shell minimization. Default = 400.

    Returns
    -------
    :obj:`~pywsep.results.EPCurve`
    """
    if not start.certified:
        raise ValueError("trace_ep_curve needs a certified starting point.")
    if r <= 0:
        raise ValueError(f"Shell radius must be > 0, got {r}.")

    objective = GapObjective(solver)
    template = start.params.replace(g=0.0)
    thresholds = {"gap_tol": gap_tol, "overlap_tol": overlap_tol, "petermann_tol": petermann_tol}

    points, radii = [start], []
    center = start.triple
    previous = None
    if direction is not None:
        previous = np.asarray(direction, dtype=float)
        previous = previous / np.linalg.norm(previous)
    reason = "max-points"

    while len(points) < max_points:
        radius, step = r, None
        while radius >= min_radius_factor * r * (1 - 1e-12):
            trials = [previous] if previous is not None else _initial_directions()
            for trial in trials:
                d = _shell_minimum(
                    center, radius, trial, objective, template, gap_tol, max_iter
                )
                point = template.with_triple(center + radius * d)
                candidate = certify(point, objective, **thresholds)
                if candidate.certified:
                    step = d
                    break
            if step is not None:
                break
            LOGGER.info("Shell of radius %.4g failed to certify; halving.", radius)
            radius *= 0.5

        if step is None:
            reason = "convergence-failure"
            break

        new_center = center + radius * step
        if _outside(new_center) > 0:
            reason = "left-domain"
            break

        folded = previous is not None and step[1] * previous[1] < 0
        points.append(candidate)
        radii.append(radius)
        center, previous = new_center, step
        if folded:
            LOGGER.info("Fold detected at point %d (delta=%.4f).", len(points) - 1, center[1])
            if stop_at_fold:
                reason = "fold-detected"
                break

    return EPCurve(points, r, reason, radii=radii)


def _serpentine(shape):
    """Get flat indices of a 2D grid row by row, reversing every other row."""
    n_rows, n_cols = shape
    for i in range(n_rows):
        columns = range(n_cols) if i % 2 == 0 else reversed(range(n_cols))
        for j in columns:
            yield i * n_cols + j


def scan_gap_plane(
    fixed,
    ranges,
    template=None,
    solver=None,
    seed_threshold=1e-2,
    certify_seeds=False,
    **find_kwargs,
):
    """Evaluate the eigenvalue gap on a plane of the (1/F, delta, phi) space.

    Cells are visited row by row in alternating direction and the pair of each cell is matched
    by eigenvector overlap to the pair of the previous cell, so the map follows one pair of
    resonances across ladder reorderings.

    Parameters
    ----------
    fixed : :obj:`tuple` of (:obj:`str`, :obj:`float`)
        Frozen coordinate name and value, e.g. ``("delta", 1.0)``.
    ranges : :obj:`dict`
        Two entries mapping the remaining coordinate names to ``(start, stop, count)``.
    template : None or :obj:`~pywsep.lattice.LatticeParams`, optional
        Supplies V0. Default = ``LatticeParams()``.
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
        Its ``n_jobs`` sets the number of threads.
    seed_threshold : :obj:`float`, optional
        Local gap minima below this are reported as EP seeds. Default = 1e-2.
    certify_seeds : :obj:`bool`, optional
        Run :func:`find_ep` from each seed with the fixed coordinate frozen. Default = False.
    **find_kwargs
        Passed to :func:`find_ep`.

    Returns
    -------
    :obj:`~pywsep.results.GapScan`
    """
    name, value = fixed
    if name not in COORDINATES:
        raise ValueError(f"Unknown fixed coordinate '{name}'; choose from {COORDINATES}.")
    axes_names = [c for c in COORDINATES if c != name]
    if sorted(ranges) != sorted(axes_names):
        raise ValueError(f"ranges must name exactly the coordinates {axes_names}.")

    axes = {}
    for axis in axes_names:
        start, stop, count = ranges[axis]
        if count < 2:
            raise ValueError(f"Resolution of axis '{axis}' must be >= 2, got {count}.")
        if not stop > start:
            raise ValueError(f"Range of axis '{axis}' is inverted: {start} >= {stop}.")
        axes[axis] = np.linspace(start, stop, int(count))

    template = (template or LatticeParams()).replace(g=0.0)
    solver = solver if solver is not None else ResonanceSolver()
    g0, g1 = np.meshgrid(axes[axes_names[0]], axes[axes_names[1]], indexing="ij")

    points = []
    for a, b in zip(g0.ravel(), g1.ravel()):
        coords = {name: value, axes_names[0]: a, axes_names[1]: b}
        points.append(template.with_triple([coords[c] for c in COORDINATES]))

    spectra = solver.solve(points).summary()
    gap, gamma_diff, energy_diff = (np.empty(len(points)) for _ in range(3))
    objective = GapObjective(solver, follow=True)
    for i in _serpentine(g0.shape):
        a, b = objective.match(spectra[i])
        gap[i] = abs(a.eigenvalue - b.eigenvalue)
        gamma_diff[i] = abs(a.gamma - b.gamma)
        energy_diff[i] = abs(a.eigenvalue.real - b.eigenvalue.real)

    shape = g0.shape
    gap, gamma_diff, energy_diff = (a.reshape(shape) for a in (gap, gamma_diff, energy_diff))

    minima = (minimum_filter(gap, size=3, mode="nearest") == gap) & (gap < seed_threshold)
    seeds = []
    for i, j in zip(*np.nonzero(minima)):
        seed = {axes_names[0]: g0[i, j], axes_names[1]: g1[i, j], "gap": gap[i, j]}
        if certify_seeds:
            coords = {name: value, axes_names[0]: g0[i, j], axes_names[1]: g1[i, j]}
            guess = template.with_triple([coords[c] for c in COORDINATES])
            candidate = find_ep(guess, frozen=name, solver=solver, **find_kwargs)
            seed.update({"certified": candidate.certified, "ep": candidate.to_dict()})
        seeds.append(seed)

    LOGGER.info(
        "Gap scan at %s=%g found %d seeds (%d cells fell back to the tracked pair).",
        name,
        value,
        len(seeds),
        objective.n_fallbacks,
    )
    return GapScan(fixed, axes, gap, gamma_diff, energy_diff, seeds)
