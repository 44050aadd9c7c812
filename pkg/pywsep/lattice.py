"""Tilted bichromatic lattice: parameters, grid, potential and Hamiltonian matrix.

All quantities are in scaled units: the lattice period is 2*pi, hbar = m = 1, energies are
measured in units of 8 E_R and the potential strength defaults to V0 = 1.
"""

import dataclasses
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import circulant, toeplitz
from sympy.calculus import finite_diff_weights

from .utils import TWO_PI, _check_inputs_shape, wrap_phase

KINETIC_METHODS = ("spectral", "fd")


@dataclass(frozen=True)
class LatticeParams:
    """Physical configuration of the tilted bichromatic lattice.

    Parameters
    ----------
    V0 : :obj:`float`, optional
        Potential strength. Must be > 0. Default = 1.
    delta : :obj:`float`, optional
        Relative strength of the second harmonic. Default = 1.
    phi : :obj:`float`, optional
        Relative phase of the second harmonic, in radians.
        Stored normalized to (-pi, pi]. Default = 0.
    F : :obj:`float`, optional
        Static field strength. Must be >= 0; F = 0 is only meaningful for band structure.
        Default = 0.25.
    g : :obj:`float`, optional
        Mean-field interaction strength. Default = 0.
    """

    V0: float = 1.0
    delta: float = 1.0
    phi: float = 0.0
    F: float = 0.25
    g: float = 0.0

    def __post_init__(self):
        if not self.V0 > 0:
            raise ValueError(f"V0 must be > 0, got {self.V0}.")
        if not self.F >= 0:
            raise ValueError(f"F must be >= 0, got {self.F}.")
        object.__setattr__(self, "phi", float(wrap_phase(self.phi)))
        for name in ("V0", "delta", "F", "g"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_inverse_field(cls, inv_F, delta=1.0, phi=0.0, V0=1.0, g=0.0):
        """Build parameters from the inverse field strength 1/F."""
        if not inv_F > 0:
            raise ValueError(f"1/F must be > 0, got {inv_F}.")
        return cls(V0=V0, delta=delta, phi=phi, F=1.0 / inv_F, g=g)

    @property
    def inv_F(self):
        """Inverse field strength 1/F."""
        return np.inf if self.F == 0 else 1.0 / self.F

    def triple(self):
        """Return the search coordinates (1/F, delta, phi) as an array."""
        return np.array([self.inv_F, self.delta, self.phi])

    def with_triple(self, triple):
        """Return a copy with (1/F, delta, phi) replaced by ``triple``."""
        inv_F, delta, phi = triple
        return self.replace(F=1.0 / inv_F, delta=delta, phi=phi)

    def replace(self, **kwargs):
        """Return a copy with the given fields replaced."""
        return dataclasses.replace(self, **kwargs)

    def require_field(self):
        """Raise if the configuration has no tilt (no resonance ladder)."""
        if self.F <= 0:
            raise ValueError("F must be > 0 for resonance computations.")

    def to_dict(self):
        """Convert to a plain dictionary, including 1/F."""
        d = dataclasses.asdict(self)
        d["inv_F"] = self.inv_F
        return d


@dataclass(frozen=True)
class GridSpec:
    """Spatial discretization of the box and placement of the absorbing potential.

    Parameters
    ----------
    periods_left : :obj:`int`, optional
        Lattice periods to the left of the central cell (downhill side). Default = 12.
    periods_right : :obj:`int`, optional
        Lattice periods to the right of the central cell. Default = 6.
    points_per_period : :obj:`int`, optional
        Grid points per lattice period. Default = 32.
    cap_strength : :obj:`float`, optional
        Strength eta of the complex absorbing potential. Must be >= 0. Default = 8.
    cap_width : :obj:`float`, optional
        Periods occupied by the CAP at the left edge. Must not exceed ``periods_left``.
        Default = 1.
    cap_order : :obj:`int`, optional
        Exponent of the monomial CAP profile. Default = 2.
    kinetic : {"spectral", "fd"}, optional
        Kinetic-energy discretization. Default = "spectral".
    stencil_points : :obj:`int`, optional
        Width of the central-difference stencil when ``kinetic="fd"``. Must be odd.
        Default = 9.
    """

    periods_left: int = 12
    periods_right: int = 6
    points_per_period: int = 32
    cap_strength: float = 8.0
    cap_width: float = 1.0
    cap_order: int = 2
    kinetic: str = "spectral"
    stencil_points: int = 9
    _x: np.ndarray = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.periods_left < 1 or self.periods_right < 1:
            raise ValueError("periods_left and periods_right must both be >= 1.")
        if self.points_per_period < 4:
            raise ValueError(f"points_per_period must be >= 4, got {self.points_per_period}.")
        if self.cap_strength < 0:
            raise ValueError(f"cap_strength must be >= 0, got {self.cap_strength}.")
        if not 0 < self.cap_width <= self.periods_left:
            raise ValueError(
                f"cap_width must lie in (0, periods_left={self.periods_left}], "
                f"got {self.cap_width}."
            )
        if self.cap_order < 1:
            raise ValueError(f"cap_order must be >= 1, got {self.cap_order}.")
        if self.kinetic not in KINETIC_METHODS:
            raise ValueError(f"kinetic must be one of {KINETIC_METHODS}, got '{self.kinetic}'.")
        if self.stencil_points < 3 or self.stencil_points % 2 == 0:
            raise ValueError(f"stencil_points must be odd and >= 3, got {self.stencil_points}.")

        x = self.x_min + self.dx * np.arange(self.n_points)
        x.setflags(write=False)
        object.__setattr__(self, "_x", x)

    def replace(self, **kwargs):
        """Return a copy with the given fields replaced."""
        return dataclasses.replace(self, **kwargs)

    @property
    def n_points(self):
        """Number of grid points N."""
        return self.points_per_period * (self.periods_left + self.periods_right)

    @property
    def dx(self):
        """Uniform grid spacing."""
        return TWO_PI / self.points_per_period

    @property
    def x_min(self):
        """Left box edge."""
        return -TWO_PI * self.periods_left

    @property
    def x_max(self):
        """Right box edge (exclusive)."""
        return TWO_PI * self.periods_right

    @property
    def length(self):
        """Total box length."""
        return TWO_PI * (self.periods_left + self.periods_right)

    @property
    def x(self):
        """Read-only array of grid positions."""
        return self._x

    @property
    def cap_length(self):
        """CAP width in length units."""
        return TWO_PI * self.cap_width

    @property
    def x_cap(self):
        """CAP onset; the CAP acts for x < x_cap."""
        return self.x_min + self.cap_length

    @property
    def window(self):
        """Physical localization window.

        It excludes the CAP, the period right of the CAP onset and the outermost period on
        the right. Ladder members next to the CAP have their outgoing flux absorbed before it
        leaves the lattice, which distorts their decay rates.
        """
        return self.x_cap + TWO_PI, self.x_max - TWO_PI

    @property
    def cap_mask(self):
        """Boolean mask of grid points inside the CAP."""
        return self.x < self.x_cap

    def periods_shift(self, n_sites):
        """Number of grid points corresponding to ``n_sites`` lattice periods."""
        return int(n_sites) * self.points_per_period


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense discretized Hamiltonian.

    Parameters
    ----------
    entries : :obj:`numpy.ndarray` of shape (N, N)
        Matrix entries. Real when the operator has no anti-hermitian part.
    params : :obj:`LatticeParams`
    grid : :obj:`GridSpec`
    symmetric : :obj:`bool`
        Whether the matrix equals its own transpose.
    """

    entries: np.ndarray
    params: LatticeParams
    grid: GridSpec
    symmetric: bool

    @property
    def dimension(self):
        """Matrix dimension N."""
        return self.entries.shape[0]

    @property
    def is_real(self):
        """Whether the matrix is real (hermitian limit)."""
        return not np.iscomplexobj(self.entries)


def potential_value(x, p):
    """Evaluate the bichromatic lattice potential.

    Parameters
    ----------
    x : :obj:`float` or :obj:`numpy.ndarray`
        Position(s).
    p : :obj:`LatticeParams`

    Returns
    -------
    :obj:`float` or :obj:`numpy.ndarray`
        (V0/2) [cos(x) + delta cos(2x + phi)].
    """
    x = np.asarray(x, dtype=float)
    return 0.5 * p.V0 * (np.cos(x) + p.delta * np.cos(2.0 * x + p.phi))


def cap_profile(x, grid):
    """Evaluate the normalized monomial CAP profile W(x).

    Parameters
    ----------
    x : :obj:`float` or :obj:`numpy.ndarray`
        Position(s) within the box.
    grid : :obj:`GridSpec`

    Returns
    -------
    :obj:`float` or :obj:`numpy.ndarray`
        ((x_cap - x) / w) ** cap_order for x < x_cap, else 0.
    """
    x = np.asarray(x, dtype=float)
    depth = np.clip((grid.x_cap - x) / grid.cap_length, 0.0, None)
    return depth**grid.cap_order


def stencil_weights(n_points):
    """Get central-difference weights of the second derivative.

    Parameters
    ----------
    n_points : :obj:`int`
        Odd stencil width.

    Returns
    -------
    :obj:`numpy.ndarray` of shape (n_points,)
        Weights for offsets -m..m (in units of 1/dx^2), m = n_points // 2.
    """
    m = n_points // 2
    offsets = list(range(-m, m + 1))
    weights = finite_diff_weights(2, offsets, 0)[2][-1]
    return np.array([float(w) for w in weights])


@lru_cache(maxsize=8)
def kinetic_matrix(grid):
    """Build the symmetric kinetic-energy matrix -1/2 d^2/dx^2 for a grid.

    The spectral variant differentiates on the box treated as periodic; the central-difference
    variant truncates the stencil at the box edges. Both are exactly symmetric.
    """
    n = grid.n_points
    if grid.kinetic == "spectral":
        k = TWO_PI * np.fft.fftfreq(n, d=grid.dx)
        column = np.fft.ifft(0.5 * k**2).real
        T = circulant(column)
    else:
        weights = stencil_weights(grid.stencil_points)
        m = grid.stencil_points // 2
        row = np.zeros(n)
        width = min(m + 1, n)
        row[:width] = -0.5 * weights[m : m + width] / grid.dx**2
        T = toeplitz(row)

    T = 0.5 * (T + T.T)
    T.setflags(write=False)
    return T


def build_hamiltonian(p, grid, density=None):
    """Assemble the dense Hamiltonian matrix.

    Parameters
    ----------
    p : :obj:`LatticeParams`
    grid : :obj:`GridSpec`
    density : None or :obj:`numpy.ndarray` of shape (N,), optional
        Nonnegative density entering the mean-field term ``p.g * density``.
        Default = None.

    Returns
    -------
    :obj:`HamiltonianMatrix`
    """
    x = grid.x
    diagonal = potential_value(x, p) + p.F * x

    if density is not None:
        density = np.asarray(density)
        _check_inputs_shape(density, x, "density", "grid")
        if np.iscomplexobj(density) or np.any(density < 0):
            raise ValueError("density must be real and nonnegative.")
        diagonal = diagonal + p.g * density

    if grid.cap_strength > 0:
        diagonal = diagonal - 1j * grid.cap_strength * cap_profile(x, grid)

    entries = kinetic_matrix(grid).astype(diagonal.dtype)
    entries[np.diag_indices_from(entries)] += diagonal

    return HamiltonianMatrix(
        entries=entries,
        params=p,
        grid=grid,
        symmetric=bool(np.array_equal(entries, entries.T)),
    )
