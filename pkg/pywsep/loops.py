"""Closed parameter loops around exceptional points and their state permutations."""

import logging

import numpy as np

from .diagnostics import match_states
from .exceptions import ContinuityError
from .results import LoopFamilyReport, LoopTrace
from .solvers import ResonanceSolver
from .utils import TWO_PI

LOGGER = logging.getLogger(__name__)

# loop positions in a 3x3 family (row-major numbering), visited around the centre
RING_ORDER = (0, 1, 2, 5, 8, 7, 6, 3)


class LoopSpec:
    """Circle in the (1/F, phi) plane at fixed delta.

    The loop point at angle beta is 1/F = 1/F_c + r sin(beta) + offsets[0] and
    phi = phi_c + r cos(beta) + offsets[1].

    Parameters
    ----------
    center : :obj:`~pywsep.lattice.LatticeParams`
        Loop centre (typically an exceptional point).
    radius : :obj:`float`
        Must be > 0.
    offsets : :obj:`tuple` of :obj:`float`, optional
        Displacement of the loop centre in (1/F, phi). Default = (0, 0).
    steps : :obj:`int`, optional
        Samples per cycle. Must be >= 32. Default = 128.
    cycles : :obj:`int`, optional
        Number of times the loop is traversed. Default = 1.
    """

    def __init__(self, center, radius, offsets=(0.0, 0.0), steps=128, cycles=1):
        if not radius > 0:
            raise ValueError(f"Loop radius must be > 0, got {radius}.")
        if steps < 32:
            raise ValueError(f"A loop needs at least 32 steps per cycle, got {steps}.")
        if cycles < 1:
            raise ValueError(f"cycles must be >= 1, got {cycles}.")
        offsets = tuple(float(o) for o in offsets)
        if center.inv_F + offsets[0] - radius <= 0:
            raise ValueError("Loop reaches 1/F <= 0; reduce the radius or move the centre.")

        self.center = center.replace(g=0.0)
        self.radius = float(radius)
        self.offsets = offsets
        self.steps = int(steps)
        self.cycles = int(cycles)

    def __repr__(self):
        return (
            f"LoopSpec(inv_F={self.center.inv_F:.6g}, delta={self.center.delta:.6g}, "
            f"phi={self.center.phi:.6g}, radius={self.radius}, offsets={self.offsets}, "
            f"steps={self.steps}, cycles={self.cycles})"
        )

    def point(self, beta):
        """Get the lattice parameters at loop angle ``beta``."""
        inv_F = self.center.inv_F + self.radius * np.sin(beta) + self.offsets[0]
        phi = self.center.phi + self.radius * np.cos(beta) + self.offsets[1]
        return self.center.replace(F=1.0 / inv_F, phi=phi)

    def betas(self):
        """Get the nominal loop angles 0, ..., 2 pi * cycles."""
        return np.linspace(0.0, TWO_PI * self.cycles, self.steps * self.cycles + 1)

    def points(self):
        """Get the parameter points of one cycle, without the repeated end point."""
        return [self.point(b) for b in self.betas()[: self.steps]]

    @classmethod
    def family(cls, center, radius, spacing, steps=128, cycles=1):
        """Build a 3x3 family of equal loops on a square grid around ``center``.

        Loops are numbered row by row; the fifth (middle) loop is centred on ``center``.

        Parameters
        ----------
        center : :obj:`~pywsep.lattice.LatticeParams`
        radius : :obj:`float`
        spacing : :obj:`float`
            Distance between neighbouring loop centres, in both 1/F and phi.
        steps, cycles : :obj:`int`, optional

        Returns
        -------
        :obj:`list` of :obj:`LoopSpec`
        """
        specs = []
        for row in range(3):
            for col in range(3):
                offsets = ((col - 1) * spacing, (1 - row) * spacing)
                specs.append(cls(center, radius, offsets, steps=steps, cycles=cycles))
        return specs


class _PairTracker:
    """Follow two states along a path, refining steps when matching is unreliable."""

    def __init__(
        self,
        point,
        solver,
        sites,
        key=None,
        overlap_tol=0.8,
        tie_tol=1e-3,
        max_refinements=3,
        n_candidates=6,
    ):
        self.point = point
        self.solver = solver
        self.sites = set(sites)
        self.key = key if key is not None else (lambda s: s)
        self.overlap_tol = overlap_tol
        self.tie_tol = tie_tol
        self.max_refinements = max_refinements
        self.n_candidates = n_candidates
        self._cache = {}
        self.n_refinements = 0

    @property
    def n_solves(self):
        """Number of distinct spectra computed."""
        return len(self._cache)

    def candidates(self, s):
        """Get the most stable states of the tracked sites at path position ``s``."""
        k = round(float(self.key(s)), 12)
        if k not in self._cache:
            spectrum = self.solver._solve(self.point(s))
            states = [r for r in spectrum if r.site_index in self.sites]
            self._cache[k] = states[: self.n_candidates]
        return self._cache[k]

    def advance(self, s_a, vectors, s_b, depth=0):
        """Continue ``vectors`` from ``s_a`` to ``s_b``.

        Returns
        -------
        :obj:`list` of :obj:`tuple`
            (s, states, gauge-fixed vectors) for every accepted position after ``s_a``.
        """
        candidates = self.candidates(s_b)
        accepted = len(candidates) >= 2
        if accepted:
            idx, S, ambiguous = match_states(vectors, candidates, tie_tol=self.tie_tol)
            accepted = not ambiguous and np.min(S) > self.overlap_tol

        if accepted:
            states = [candidates[i] for i in idx]
            fixed = [_fix_gauge(prev, st.right_vector) for prev, st in zip(vectors, states)]
            return [(s_b, states, fixed)]

        if depth >= self.max_refinements:
            raise ContinuityError(
                f"Lost track of the pair between {s_a:.6g} and {s_b:.6g} after "
                f"{self.max_refinements} step halvings."
            )

        self.n_refinements += 1
        mid = 0.5 * (s_a + s_b)
        first = self.advance(s_a, vectors, mid, depth + 1)
        return first + self.advance(mid, first[-1][2], s_b, depth + 1)


def _fix_gauge(previous, vector):
    """Choose the sign of a c-normalized vector continuous with its predecessor."""
    return -vector if np.vdot(previous, vector).real < 0 else vector


def _cycle_relation(initial, vectors):
    """Get the permutation and signs of tracked vectors relative to the initial ones."""
    S = np.array([[np.vdot(a, b) for b in vectors] for a in initial])
    swap = abs(S[0, 1]) + abs(S[1, 0]) > abs(S[0, 0]) + abs(S[1, 1])
    targets = (1, 0) if swap else (0, 1)
    signs = tuple(int(np.sign(S[targets[i], i].real)) or 1 for i in range(2))
    return ("swap" if swap else "identity"), signs


def run_loop(
    spec,
    solver=None,
    overlap_tol=0.8,
    tie_tol=1e-3,
    max_refinements=3,
    n_candidates=6,
):
    """Follow the tracked pair adiabatically around a loop.

    Spectra are cached per angle modulo 2 pi, so additional cycles cost no new solves. Each
    step matches the two tracked states by maximal overlap among the most stable states of
    their cell; a step whose overlaps fall below ``overlap_tol`` or tie is halved.

    Parameters
    ----------
    spec : :obj:`LoopSpec`
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
    overlap_tol : :obj:`float`, optional
        Default = 0.8.
    tie_tol : :obj:`float`, optional
        Default = 1e-3.
    max_refinements : :obj:`int`, optional
        Step halvings allowed before raising :obj:`~pywsep.exceptions.ContinuityError`.
        Default = 3.
    n_candidates : :obj:`int`, optional
        Default = 6.

    Returns
    -------
    :obj:`~pywsep.results.LoopTrace`
    """
    solver = solver if solver is not None else ResonanceSolver()
    start = solver._solve(spec.point(0.0))
    pair = start.tracked_pair(reference_site=solver.reference_site)
    # refined angles land on a grid of 2**max_refinements substeps
    resolution = spec.steps * 2**max_refinements

    tracker = _PairTracker(
        spec.point,
        solver,
        sites=[r.site_index for r in pair],
        key=lambda b: int(np.rint(b / TWO_PI * resolution)) % resolution,
        overlap_tol=overlap_tol,
        tie_tol=tie_tol,
        max_refinements=max_refinements,
        n_candidates=n_candidates,
    )
    tracker._cache[0] = [r for r in start if r.site_index in tracker.sites][:n_candidates]

    initial = [r.right_vector for r in pair]
    component = int(np.argmax(np.abs(initial[0]) ** 2))

    betas = spec.betas()
    samples = [(0.0, list(pair), initial)]
    permutations, signs = [], []
    for i, (b_a, b_b) in enumerate(zip(betas[:-1], betas[1:])):
        samples += tracker.advance(b_a, samples[-1][2], b_b)
        if (i + 1) % spec.steps == 0:
            perm, sign = _cycle_relation(initial, samples[-1][2])
            permutations.append(perm)
            signs.append(sign)
            LOGGER.info("Cycle %d: %s, signs %s.", len(permutations), perm, sign)

    beta_samples = np.array([s for s, _, _ in samples])
    eigenvalues = np.array([[st.eigenvalue for st in states] for _, states, _ in samples]).T
    components = np.array([[v[component] for v in vecs] for _, _, vecs in samples]).T

    return LoopTrace(
        spec,
        beta_samples,
        eigenvalues,
        components,
        permutations,
        signs,
        n_solves=tracker.n_solves,
        n_refinements=tracker.n_refinements,
    )


def _interchanged(spec_a, spec_b, solver, n_steps, **kwargs):
    """Continue the pair from the start of one loop to the start of the next."""
    a, b = spec_a.point(0.0), spec_b.point(0.0)
    ta, tb = a.triple(), b.triple()

    def point(s):
        return a.with_triple(ta + s * (tb - ta))

    start = solver._solve(a).tracked_pair(reference_site=solver.reference_site)
    end = solver._solve(b).tracked_pair(reference_site=solver.reference_site)
    sites = {r.site_index for r in start} | {r.site_index for r in end}
    tracker = _PairTracker(point, solver, sites, **kwargs)

    vectors = [r.right_vector for r in start]
    path = np.linspace(0.0, 1.0, n_steps + 1)
    for s_a, s_b in zip(path[:-1], path[1:]):
        vectors = tracker.advance(s_a, vectors, s_b)[-1][2]

    idx, _, _ = match_states(vectors, list(end))
    return bool(idx[0] == 1)


def classify_loop_family(specs, solver=None, n_steps=16, **kwargs):
    """Run a sequence of loops and check state identities between neighbours.

    Parameters
    ----------
    specs : :obj:`list` of :obj:`LoopSpec`
        Loops in the order they are compared, e.g. a ring from :meth:`LoopSpec.family`
        reordered with :data:`RING_ORDER`.
    solver : None or :obj:`~pywsep.solvers.ResonanceSolver`, optional
    n_steps : :obj:`int`, optional
        Steps of the straight path between the starting points of consecutive loops.
        Default = 16.
    **kwargs
        Passed to :func:`run_loop`.

    Returns
    -------
    :obj:`~pywsep.results.LoopFamilyReport`
    """
    solver = solver if solver is not None else ResonanceSolver()
    traces = [run_loop(spec, solver=solver, **kwargs) for spec in specs]
    interchanged = [
        _interchanged(a, b, solver, n_steps, **kwargs) for a, b in zip(specs[:-1], specs[1:])
    ]
    return LoopFamilyReport(traces, interchanged)
