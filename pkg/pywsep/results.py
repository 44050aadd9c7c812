"""Tools for representing and summarizing resonance, EP, loop and crossing results."""

import dataclasses
from dataclasses import dataclass, field
from functools import lru_cache
from warnings import warn

import numpy as np
import pandas as pd

from .diagnostics import petermann
from .utils import TWO_PI


@dataclass(frozen=True)
class Resonance:
    """One complex eigenvalue E - i Gamma/2 with its right eigenvector.

    Parameters
    ----------
    eigenvalue : :obj:`complex`
        Eigenvalue of the discretized Hamiltonian (not reduced to a site).
    energy : :obj:`float`
        Real part reduced to site 0, E - 2 pi F n.
    gamma : :obj:`float`
        Decay rate, -2 Im(eigenvalue).
    right_vector : :obj:`numpy.ndarray`
        c-normalized right eigenvector (psi^T psi = 1).
    site_index : :obj:`int`
        Lattice site n of the localization centre.
    localization_center : :obj:`float`
        c-product expectation of x.
    cap_leakage : :obj:`float`
        Fraction of |psi|^2 inside the CAP.
    residual : :obj:`float`
        ||H psi - mu psi|| / ||psi||.
    ladder_index : None or :obj:`int`, optional
        Ladder alpha; None until labeled or when the assignment was ambiguous.
    ambiguous : :obj:`bool`, optional
        Whether ladder labeling found several candidate ladders.
    near_defective : :obj:`bool`, optional
        Whether another eigenvalue lies within the degeneracy tolerance.
    symmetric : :obj:`bool`, optional
        Whether the Hamiltonian was complex symmetric.
    """

    eigenvalue: complex
    energy: float
    gamma: float
    right_vector: np.ndarray = field(repr=False, compare=False)
    site_index: int
    localization_center: float
    cap_leakage: float
    residual: float
    ladder_index: int = None
    ambiguous: bool = False
    near_defective: bool = False
    symmetric: bool = True

    @property
    def mu(self):
        """Site-reduced complex energy E - i Gamma / 2."""
        return complex(self.energy, -0.5 * self.gamma)

    @property
    def petermann(self):
        """Petermann factor of this state."""
        return petermann(self)

    def replace(self, **kwargs):
        """Return a copy with the given fields replaced."""
        return dataclasses.replace(self, **kwargs)

    def to_dict(self):
        """Summarize the state without its eigenvector.

        K is None, and ``saturated`` True, when the Petermann factor overflowed.
        """
        K, saturated = petermann(self, return_flag=True)
        return {
            "E": self.energy,
            "Gamma": self.gamma,
            "alpha": self.ladder_index,
            "n": self.site_index,
            "K": None if saturated else K,
            "saturated": saturated,
            "cap_leakage": self.cap_leakage,
            "center": self.localization_center,
            "residual": self.residual,
            "ambiguous": self.ambiguous,
            "near_defective": self.near_defective,
        }


class SpectrumSlice:
    """Physical resonances of one parameter point, sorted by decay rate.

    Parameters
    ----------
    params : :obj:`~pywsep.lattice.LatticeParams`
    grid : :obj:`~pywsep.lattice.GridSpec`
    resonances : :obj:`list` of :obj:`Resonance`
    eta_used : :obj:`float`
        CAP strength the spectrum was computed with.
    miniladder_offset : None or :obj:`float`, optional
        Half the splitting of the two lowest interleaved ladders reduced to one site.
    """

    def __init__(self, params, grid, resonances, eta_used, miniladder_offset=None):
        if not len(resonances):
            raise ValueError("A SpectrumSlice needs at least one resonance.")
        self.params = params
        self.grid = grid
        self.resonances = tuple(sorted(resonances, key=lambda r: r.gamma))
        self.eta_used = eta_used
        self.miniladder_offset = miniladder_offset

    def __len__(self):
        return len(self.resonances)

    def __iter__(self):
        return iter(self.resonances)

    def __getitem__(self, idx):
        return self.resonances[idx]

    @property
    @lru_cache(maxsize=1)
    def ladders(self):
        """Get the sorted ladder indices present in the slice."""
        return sorted({r.ladder_index for r in self.resonances if r.ladder_index is not None})

    def ladder(self, alpha):
        """Get the members of ladder ``alpha`` ordered by site."""
        members = [r for r in self.resonances if r.ladder_index == alpha]
        return sorted(members, key=lambda r: r.site_index)

    def tracked_pair(self, reference_site=0, return_flag=False):
        """Select the two most stable resonances of one lattice cell.

        The first state is the ladder-1 member closest to ``reference_site``; the second is the
        ladder-2 member closest to it in the complex energy plane. If either ladder is missing
        the two smallest-Gamma states are returned with a warning.

        Parameters
        ----------
        reference_site : :obj:`int`, optional
            Default = 0.
        return_flag : :obj:`bool`, optional
            Also return whether the fallback was used. Default = False.

        Returns
        -------
        :obj:`tuple` of :obj:`Resonance`
        """
        first, second = self.ladder(1), self.ladder(2)
        fallback = not (first and second)
        if fallback:
            if len(self.resonances) < 2:
                raise ValueError("At least two resonances are required to form a pair.")
            warn("Ladder labels unavailable; using the two smallest-Gamma states.")
            pair = tuple(self.resonances[:2])
        else:
            r1 = min(first, key=lambda r: (abs(r.site_index - reference_site), r.gamma))
            r2 = min(second, key=lambda r: abs(r.eigenvalue - r1.eigenvalue))
            pair = (r1, r2)

        return (pair, fallback) if return_flag else pair

    def to_records(self):
        """Get one JSON-compatible record per resonance."""
        params = self.params.to_dict()
        records = []
        for res in self.resonances:
            rec = {"params": params}
            rec.update(res.to_dict())
            rec["eta_used"] = self.eta_used
            records.append(rec)
        return records

    def to_df(self):
        """Return a pandas DataFrame with one row per resonance.

        Returns
        -------
        df : :obj:`pandas.DataFrame`
            Columns E, Gamma, alpha, n, K, saturated, cap_leakage, center, residual, ambiguous
            and near_defective.
        """
        return pd.DataFrame([res.to_dict() for res in self.resonances])


@dataclass(frozen=True)
class LandauZenerFit:
    """Least-squares fit of log(Gamma/F) = intercept + slope / F."""

    slope: float
    intercept: float
    residual: float
    n_samples: int
    expected_slope: float = None

    def to_dict(self):
        """Convert to a plain dictionary."""
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class EPCandidate:
    """A parameter point with the diagnostics that certify an exceptional point.

    Parameters
    ----------
    params : :obj:`~pywsep.lattice.LatticeParams`
    gap : :obj:`float`
        |mu_1 - mu_2| of the tracked pair.
    overlap_S : :obj:`float`
        Overlap of the tracked pair.
    petermann_min : :obj:`float`
        min(K_1, K_2).
    certified : :obj:`bool`
    converged : :obj:`bool`, optional
        Whether the simplex met its tolerances. Default = True.
    n_evaluations : :obj:`int`, optional
        Objective evaluations spent. Default = 0.
    """

    params: object
    gap: float
    overlap_S: float
    petermann_min: float
    certified: bool
    converged: bool = True
    n_evaluations: int = 0

    @property
    def triple(self):
        """Get the EP coordinates (1/F, delta, phi)."""
        return self.params.triple()

    def to_dict(self):
        """Convert to a JSON-compatible record."""
        inv_F, delta, phi = self.triple
        return {
            "inv_F": inv_F,
            "delta": delta,
            "phi": phi,
            "gap": self.gap,
            "overlap_S": self.overlap_S,
            "petermann_min": self.petermann_min if np.isfinite(self.petermann_min) else None,
            "certified": self.certified,
            "converged": self.converged,
            "n_evaluations": self.n_evaluations,
        }


TERMINATION_REASONS = ("left-domain", "fold-detected", "max-points", "convergence-failure")


class EPCurve:
    """Ordered exceptional points traced by spherical-shell continuation.

    Parameters
    ----------
    points : :obj:`list` of :obj:`EPCandidate`
    step_r : :obj:`float`
        Shell radius.
    termination_reason : {"left-domain", "fold-detected", "max-points", "convergence-failure"}
    radii : :obj:`list` of :obj:`float`, optional
        Shell radius used for each step (reduced radii reflect step halving).
    """

    def __init__(self, points, step_r, termination_reason, radii=None):
        if termination_reason not in TERMINATION_REASONS:
            raise ValueError(f"Unknown termination reason '{termination_reason}'.")
        self.points = list(points)
        self.step_r = step_r
        self.termination_reason = termination_reason
        self.radii = list(radii) if radii is not None else [step_r] * (len(self.points) - 1)

    def __len__(self):
        return len(self.points)

    @property
    def coordinates(self):
        """Get an (n_points, 3) array of (1/F, delta, phi)."""
        return np.array([p.triple for p in self.points])

    @property
    def steps(self):
        """Get the displacement vectors between consecutive points."""
        return np.diff(self.coordinates, axis=0)

    @property
    def folds(self):
        """Get indices of points where the delta component of the step reverses."""
        d_delta = self.steps[:, 1]
        return [i + 1 for i in range(len(d_delta) - 1) if d_delta[i] * d_delta[i + 1] < 0]

    def plane_crossings(self, delta):
        """Interpolate the points where the curve crosses a plane of constant delta."""
        coords = self.coordinates
        out = []
        for a, b in zip(coords[:-1], coords[1:]):
            da, db = a[1] - delta, b[1] - delta
            if da == 0:
                out.append(a)
            elif da * db < 0:
                t = da / (da - db)
                out.append(a + t * (b - a))
        return np.array(out).reshape(-1, 3)

    def to_df(self):
        """Return a pandas DataFrame with one row per point."""
        return pd.DataFrame([p.to_dict() for p in self.points])


class GapScan:
    """Gap values over a plane of the (1/F, delta, phi) space.

    Parameters
    ----------
    fixed : :obj:`tuple` of (:obj:`str`, :obj:`float`)
        Name and value of the frozen coordinate.
    axes : :obj:`dict`
        Two entries mapping coordinate names to 1d arrays of values.
    gap : :obj:`numpy.ndarray`
        |mu_1 - mu_2|, shape (len(axis 0), len(axis 1)).
    gamma_diff, energy_diff : :obj:`numpy.ndarray`
        |Gamma_1 - Gamma_2| and |E_1 - E_2| on the same grid.
    seeds : :obj:`list` of :obj:`dict`
        Local minima of the gap below the seed threshold.
    """

    def __init__(self, fixed, axes, gap, gamma_diff, energy_diff, seeds):
        self.fixed = fixed
        self.axes = axes
        self.gap = gap
        self.gamma_diff = gamma_diff
        self.energy_diff = energy_diff
        self.seeds = seeds

    def to_df(self):
        """Return a long-format pandas DataFrame with one row per grid cell."""
        (n0, v0), (n1, v1) = self.axes.items()
        g0, g1 = np.meshgrid(v0, v1, indexing="ij")
        return pd.DataFrame(
            {
                n0: g0.ravel(),
                n1: g1.ravel(),
                "gap": self.gap.ravel(),
                "gamma_diff": self.gamma_diff.ravel(),
                "energy_diff": self.energy_diff.ravel(),
            }
        )


class PetermannScan:
    """Petermann factors of the tracked pair along a cut in 1/F.

    Parameters
    ----------
    inv_F : :obj:`numpy.ndarray`
    K1, K2 : :obj:`numpy.ndarray`
    mu1, mu2 : :obj:`numpy.ndarray`
        Complex (site-reduced) energies of the tracked states.
    g : :obj:`float`, optional
        Interaction strength. Default = 0.
    """

    def __init__(self, inv_F, K1, K2, mu1, mu2, g=0.0):
        self.inv_F = np.asarray(inv_F, dtype=float)
        self.K1 = np.asarray(K1, dtype=float)
        self.K2 = np.asarray(K2, dtype=float)
        self.mu1 = np.asarray(mu1, dtype=complex)
        self.mu2 = np.asarray(mu2, dtype=complex)
        self.g = g

    @property
    def F(self):
        """Field strengths of the samples."""
        return 1.0 / self.inv_F

    def peak(self, which=1):
        """Get (1/F, K) at the maximum of K_1 or K_2."""
        K = self.K1 if which == 1 else self.K2
        i = int(np.argmax(K))
        return self.inv_F[i], K[i]

    def peak_width(self, which=1):
        """Get the full width in 1/F of the dip of 1/K below half its maximum depth."""
        K = self.K1 if which == 1 else self.K2
        inv_K = 1.0 / K
        i = int(np.argmin(inv_K))
        level = 0.5 * (1.0 + inv_K[i])
        lo = i
        while lo > 0 and inv_K[lo - 1] < level:
            lo -= 1
        hi = i
        while hi < len(inv_K) - 1 and inv_K[hi + 1] < level:
            hi += 1
        return abs(self.inv_F[hi] - self.inv_F[lo])

    def to_df(self):
        """Return a pandas DataFrame with one row per sample."""
        return pd.DataFrame(
            {
                "inv_F": self.inv_F,
                "F": self.F,
                "K1": self.K1,
                "K2": self.K2,
                "inv_K1": 1.0 / self.K1,
                "inv_K2": 1.0 / self.K2,
                "E1": self.mu1.real,
                "Gamma1": -2.0 * self.mu1.imag,
                "E2": self.mu2.real,
                "Gamma2": -2.0 * self.mu2.imag,
                "g": self.g,
            }
        )


class LoopTrace:
    """Eigenvalue and eigenvector tracks of the tracked pair along a closed loop.

    Parameters
    ----------
    spec : :obj:`~pywsep.loops.LoopSpec`
    beta_samples : :obj:`numpy.ndarray` of shape (n,)
        Loop angles, including refined intermediate steps, from 0 to 2 pi * cycles.
    eigenvalue_tracks : :obj:`numpy.ndarray` of shape (2, n)
    component_tracks : :obj:`numpy.ndarray` of shape (2, n)
    permutations : :obj:`list` of :obj:`str`
        "identity" or "swap" after each completed cycle, relative to the start.
    component_signs : :obj:`list` of :obj:`tuple`
        Signs (s1, s2) after each cycle: track i ends on s_i times the initial state it matches.
    n_solves : :obj:`int`
    n_refinements : :obj:`int`
    """

    def __init__(
        self,
        spec,
        beta_samples,
        eigenvalue_tracks,
        component_tracks,
        permutations,
        component_signs,
        n_solves,
        n_refinements=0,
    ):
        self.spec = spec
        self.beta_samples = np.asarray(beta_samples)
        self.eigenvalue_tracks = np.asarray(eigenvalue_tracks)
        self.component_tracks = np.asarray(component_tracks)
        self.permutations = list(permutations)
        self.component_signs = list(component_signs)
        self.n_solves = n_solves
        self.n_refinements = n_refinements

    @property
    def permutation(self):
        """Permutation after the first cycle."""
        return self.permutations[0]

    @property
    def encloses_ep(self):
        """Whether the loop encloses an EP (the first cycle swaps the pair)."""
        return self.permutation == "swap"

    @property
    def component_sign(self):
        """Signs acquired after each cycle."""
        return self.component_signs

    @property
    def closure_cycles(self):
        """Get the number of cycles after which both states return to themselves."""
        for i, (perm, signs) in enumerate(zip(self.permutations, self.component_signs)):
            if perm == "identity" and signs == (1, 1):
                return i + 1
        return None

    @property
    def eigenvalue_closure_cycles(self):
        """Get the number of cycles after which the eigenvalue set returns to itself."""
        for i, perm in enumerate(self.permutations):
            if perm == "identity":
                return i + 1
        return None

    def cycle_slice(self, cycle):
        """Get a boolean mask of samples within cycle ``cycle`` (0-based), both ends included."""
        lo, hi = TWO_PI * cycle, TWO_PI * (cycle + 1)
        return (self.beta_samples >= lo - 1e-12) & (self.beta_samples <= hi + 1e-12)

    def max_jump_ratio(self):
        """Get the largest adjacent eigenvalue jump relative to the median jump."""
        jumps = np.abs(np.diff(self.eigenvalue_tracks, axis=1))
        return float(np.max(jumps) / np.median(jumps))

    def winding_numbers(self):
        """Get the winding number of each one-cycle track around its own centroid."""
        out = []
        mask = self.cycle_slice(0)
        for track in self.eigenvalue_tracks:
            z = track[mask]
            angle = np.unwrap(np.angle(z - z.mean()))
            out.append(int(np.rint((angle[-1] - angle[0]) / TWO_PI)))
        return out

    def tracks_disjoint(self):
        """Check whether the one-cycle tracks occupy disjoint bounding boxes."""
        mask = self.cycle_slice(0)
        a, b = self.eigenvalue_tracks[0][mask], self.eigenvalue_tracks[1][mask]
        return bool(
            a.real.max() < b.real.min()
            or b.real.max() < a.real.min()
            or a.imag.max() < b.imag.min()
            or b.imag.max() < a.imag.min()
        )

    @property
    def needs_review(self):
        """Flag non-enclosing loops whose tracks neither wind once nor separate."""
        if self.encloses_ep:
            return False
        return not (self.tracks_disjoint() or self.winding_numbers() == [1, 1])

    def verdict(self):
        """Get a JSON-compatible verdict record."""
        return {
            "encloses_ep": self.encloses_ep,
            "permutation": self.permutation,
            "permutations": self.permutations,
            "component_signs": [list(s) for s in self.component_signs],
            "closure_cycles": self.closure_cycles,
            "eigenvalue_closure_cycles": self.eigenvalue_closure_cycles,
            "n_solves": self.n_solves,
            "n_refinements": self.n_refinements,
            "needs_review": self.needs_review,
        }

    def to_df(self):
        """Return a pandas DataFrame with one row per loop sample."""
        e1, e2 = self.eigenvalue_tracks
        c1, c2 = self.component_tracks
        return pd.DataFrame(
            {
                "beta": self.beta_samples,
                "re_e1": e1.real,
                "im_e1": e1.imag,
                "re_e2": e2.real,
                "im_e2": e2.imag,
                "re_c1": c1.real,
                "im_c1": c1.imag,
                "re_c2": c2.real,
                "im_c2": c2.imag,
            }
        )


class LoopFamilyReport:
    """Verdicts of a family of loops.

    Parameters
    ----------
    traces : :obj:`list` of :obj:`LoopTrace`
    interchanged : :obj:`list` of :obj:`bool`
        For each pair of consecutive loops, whether the state that starts as the more stable
        one in the first loop continues into the less stable one of the next.
    """

    def __init__(self, traces, interchanged):
        self.traces = list(traces)
        self.interchanged = list(interchanged)

    @property
    def n_swaps(self):
        """Number of loops that enclose an EP."""
        return sum(t.encloses_ep for t in self.traces)

    @property
    def enclosing(self):
        """Indices of loops that enclose an EP."""
        return [i for i, t in enumerate(self.traces) if t.encloses_ep]

    def to_df(self):
        """Return a pandas DataFrame with one row per loop."""
        rows = []
        for i, trace in enumerate(self.traces):
            center = trace.spec.center
            rows.append(
                {
                    "loop": i,
                    "inv_F": center.inv_F + trace.spec.offsets[0],
                    "phi": center.phi + trace.spec.offsets[1],
                    "radius": trace.spec.radius,
                    "permutation": trace.permutation,
                    "encloses_ep": trace.encloses_ep,
                    "interchanged_with_next": (
                        self.interchanged[i] if i < len(self.interchanged) else None
                    ),
                }
            )
        return pd.DataFrame(rows)


@dataclass(frozen=True)
class NonlinearResonance:
    """Self-consistent resonance of the Gross-Pitaevskii problem.

    Parameters
    ----------
    mu : :obj:`complex`
        Chemical potential M - i Gamma / 2 (not reduced to a site).
    density : :obj:`numpy.ndarray`
        Density field entering the mean-field term, one central period normalized to 1.
    right_vector : :obj:`numpy.ndarray`
        c-normalized eigenvector of the frozen-density operator.
    g_used : :obj:`float`
    iterations : :obj:`int`
    residual : :obj:`float`
        Final eigenvalue change of the iteration.
    site_index : :obj:`int`
    symmetric : :obj:`bool`, optional
        Whether the frozen-density operator was complex symmetric. Default = True.
    """

    mu: complex
    density: np.ndarray = field(repr=False, compare=False)
    right_vector: np.ndarray = field(repr=False, compare=False)
    g_used: float
    iterations: int
    residual: float
    site_index: int = 0
    symmetric: bool = True

    @property
    def gamma(self):
        """Decay rate -2 Im(mu)."""
        return -2.0 * self.mu.imag

    @property
    def petermann(self):
        """Petermann factor from the frozen-density operator."""
        return petermann(self)

    def to_dict(self):
        """Summarize without fields or vectors."""
        K, saturated = petermann(self, return_flag=True)
        return {
            "M": self.mu.real,
            "Gamma": self.gamma,
            "g": self.g_used,
            "n": self.site_index,
            "K": None if saturated else K,
            "saturated": saturated,
            "iterations": self.iterations,
            "residual": self.residual,
            "normalization": "unit density per central period",
        }


CROSSING_TYPES = ("type-I", "type-II", "degenerate", "avoided")


@dataclass(frozen=True)
class CrossingReport:
    """Classification of a crossing of two complex energies along an F scan.

    Parameters
    ----------
    g : :obj:`float`
    F_range : :obj:`tuple` of :obj:`float`
    type : {"type-I", "type-II", "degenerate", "avoided"}
        "type-I": real parts anti-cross while imaginary parts cross; "type-II" the converse;
        "degenerate": both cross; "avoided": neither does.
    closest_approach_real : :obj:`float`
        min |M_1 - M_2|.
    closest_approach_imag : :obj:`float`
        min |Gamma_1 - Gamma_2|.
    F_closest_real, F_closest_imag : :obj:`float`
        Field strengths of the closest approaches.
    """

    g: float
    F_range: tuple
    type: str
    closest_approach_real: float
    closest_approach_imag: float
    F_closest_real: float
    F_closest_imag: float

    def __post_init__(self):
        if self.type not in CROSSING_TYPES:
            raise ValueError(f"Unknown crossing type '{self.type}'.")

    def to_dict(self):
        """Convert to a JSON-compatible record."""
        d = dataclasses.asdict(self)
        d["F_range"] = list(self.F_range)
        return d


class NonlinearScan:
    """Tracked nonlinear pair along a scan in F.

    Parameters
    ----------
    F : :obj:`numpy.ndarray`
    states : :obj:`list` of :obj:`tuple` of :obj:`NonlinearResonance`
        Identity-matched pair at each F.
    g : :obj:`float`
    """

    def __init__(self, F, states, g):
        self.F = np.asarray(F, dtype=float)
        self.states = list(states)
        self.g = g

    @property
    def mu1(self):
        """Chemical potentials of track 1, reduced to site 0."""
        return np.array([self._reduced(a, F) for (a, _), F in zip(self.states, self.F)])

    @property
    def mu2(self):
        """Chemical potentials of track 2, reduced to site 0."""
        return np.array([self._reduced(b, F) for (_, b), F in zip(self.states, self.F)])

    @staticmethod
    def _reduced(state, F):
        return state.mu - TWO_PI * F * state.site_index

    @property
    def K1(self):
        """Petermann factors of track 1."""
        return np.array([a.petermann for a, _ in self.states])

    @property
    def K2(self):
        """Petermann factors of track 2."""
        return np.array([b.petermann for _, b in self.states])

    def petermann_scan(self):
        """Convert to a :obj:`PetermannScan` over 1/F."""
        return PetermannScan(1.0 / self.F, self.K1, self.K2, self.mu1, self.mu2, g=self.g)

    def to_records(self):
        """Get one JSON-compatible record per scan point."""
        records = []
        for F, (a, b) in zip(self.F, self.states):
            records.append({"F": F, "state1": a.to_dict(), "state2": b.to_dict()})
        return records

    def to_df(self):
        """Return a pandas DataFrame with one row per scan point."""
        return self.petermann_scan().to_df()
