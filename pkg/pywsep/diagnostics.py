"""Eigenvector diagnostics: overlaps, Petermann factors, translations and state matching."""

import numpy as np
from scipy.optimize import linear_sum_assignment

from .utils import TWO_PI, _check_inputs_shape

# |psi^T psi| / ||psi||^2 below this is treated as an exceptional-point coalescence
PETERMANN_GUARD = 1e-150


def _as_vector(state):
    """Return the right eigenvector of a state, or the array itself."""
    vec = getattr(state, "right_vector", state)
    return np.asarray(vec)


def c_normalize(psi):
    """Scale a vector so that its c-product with itself is one.

    Parameters
    ----------
    psi : :obj:`numpy.ndarray`
        Complex vector.

    Returns
    -------
    :obj:`numpy.ndarray`
        psi / sqrt(psi^T psi), principal branch of the square root.
    """
    psi = np.asarray(psi, dtype=complex)
    cnorm = np.sum(psi * psi)
    if cnorm == 0:
        raise ValueError("Vector has zero c-norm and cannot be c-normalized.")
    return psi / np.sqrt(cnorm)


def unit_normalize(psi):
    """Scale a vector to unit 2-norm."""
    psi = np.asarray(psi)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("Zero vector cannot be normalized.")
    return psi / norm


def overlap(a, b):
    """Compute the overlap S = |<a|b>| of hermitian-normalized copies of two states.

    Parameters
    ----------
    a, b : :obj:`~pywsep.results.Resonance` or :obj:`numpy.ndarray`
        States or raw vectors of identical length.

    Returns
    -------
    :obj:`float`
        Overlap in [0, 1].
    """
    va, vb = _as_vector(a), _as_vector(b)
    _check_inputs_shape(va, vb, "a", "b")
    return float(min(1.0, abs(np.vdot(unit_normalize(va), unit_normalize(vb)))))


def petermann(a, return_flag=False):
    """Compute the Petermann factor of a complex-symmetric eigenvector.

    The left eigenvector of a complex-symmetric operator is conj(psi), so
    K = ||psi||^4 / |psi^T psi|^2.

    Parameters
    ----------
    a : :obj:`~pywsep.results.Resonance` or :obj:`numpy.ndarray`
        State or raw right eigenvector.
    return_flag : :obj:`bool`, optional
        Also return whether the underflow guard was hit. Default = False.

    Returns
    -------
    K : :obj:`float`
        Petermann factor (>= 1), or ``inf`` at coalescence.
    saturated : :obj:`bool`
        Only returned if ``return_flag`` is True.
    """
    if getattr(a, "symmetric", True) is False:
        raise ValueError(
            "Petermann factors from conj(psi) require a complex-symmetric Hamiltonian."
        )

    psi = _as_vector(a)
    norm2 = np.vdot(psi, psi).real
    if norm2 == 0:
        raise ValueError("Zero vector has no Petermann factor.")

    ratio = abs(np.sum(psi * psi)) / norm2
    saturated = ratio < PETERMANN_GUARD
    K = np.inf if saturated else max(1.0, 1.0 / ratio**2)
    return (K, saturated) if return_flag else K


def localization_center(psi, x):
    """Get the c-product position expectation Re(psi^T x psi) / Re(psi^T psi)."""
    psi2 = psi * psi
    return float(np.real(np.sum(x * psi2)) / np.real(np.sum(psi2)))


def site_index(center):
    """Get the lattice site of a localization centre.

    Cell n spans [2 pi n - pi/2, 2 pi n + 3 pi/2), so both wells near 2 pi n and 2 pi n + pi
    belong to site n.
    """
    return int(np.floor((center + 0.5 * np.pi) / TWO_PI))


def translate_vector(psi, grid, n_sites):
    """Shift a vector by ``n_sites`` lattice periods (to the right for positive values).

    Points shifted past the box edge wrap around; they carry the tail of the state only.
    """
    return np.roll(np.asarray(psi), grid.periods_shift(n_sites))


def translation_overlap(a, b, grid, halfwidth=1.5):
    """Compare a state with a translate of another state around the target's core.

    Parameters
    ----------
    a, b : :obj:`~pywsep.results.Resonance`
        States carrying ``right_vector`` and ``site_index``.
    grid : :obj:`~pywsep.lattice.GridSpec`
    halfwidth : :obj:`float`, optional
        Half width of the comparison region, in periods, around the centre of ``b``.
        Default = 1.5.

    Returns
    -------
    :obj:`float`
        Overlap of ``a`` shifted onto ``b``'s site with ``b``, restricted to the region.
    """
    shifted = translate_vector(a.right_vector, grid, b.site_index - a.site_index)
    mask = np.abs(grid.x - b.localization_center) <= halfwidth * TWO_PI
    va, vb = shifted[mask], b.right_vector[mask]
    if not np.any(va) or not np.any(vb):
        return 0.0
    return overlap(va, vb)


def overlap_matrix(previous, candidates):
    """Get the matrix of |<p_i|c_j>| over unit-normalized copies."""
    P = np.column_stack([unit_normalize(_as_vector(v)) for v in previous])
    C = np.column_stack([unit_normalize(_as_vector(v)) for v in candidates])
    return np.abs(P.conj().T @ C)


def match_states(previous, candidates, tie_tol=1e-3):
    """Match tracked states to candidates by maximal overlap.

    Parameters
    ----------
    previous : :obj:`list`
        Tracked states or vectors.
    candidates : :obj:`list`
        Candidate states or vectors, at least as many as ``previous``.
    tie_tol : :obj:`float`, optional
        Two candidates whose overlaps with one tracked state differ by less than this are a tie.
        Default = 1e-3.

    Returns
    -------
    indices : :obj:`numpy.ndarray`
        Candidate index assigned to each tracked state.
    overlaps : :obj:`numpy.ndarray`
        Overlap of each assignment.
    ambiguous : :obj:`bool`
        Whether any assignment was a tie.
    """
    if len(candidates) < len(previous):
        raise ValueError(
            f"Need at least {len(previous)} candidates to match, got {len(candidates)}."
        )

    S = overlap_matrix(previous, candidates)
    rows, cols = linear_sum_assignment(-S)
    indices = cols[np.argsort(rows)]
    overlaps = S[np.arange(len(previous)), indices]

    ambiguous = False
    if S.shape[1] > 1:
        ranked = np.sort(S, axis=1)
        ambiguous = bool(np.any(ranked[:, -1] - ranked[:, -2] < tie_tol))

    return indices, overlaps, ambiguous


def pair_projector_residual(a, b, H):
    """Check the c-product spectral projectors of a pair of eigenvectors.

    With c-normalized vectors u, v the matrix P = u u^T + v v^T projects onto their spectral
    subspace. Away from an exceptional point P acts as the identity on span(u, v) and
    P H P reproduces diag(mu_a, mu_b) in that basis.

    Returns
    -------
    :obj:`float`
        Largest absolute deviation of the 2x2 reduced quantities from their ideal values.
    """
    u, v = c_normalize(_as_vector(a)), c_normalize(_as_vector(b))
    entries = getattr(H, "entries", H)
    basis = np.column_stack([u, v])
    gram = basis.T @ basis
    reduced = basis.T @ entries @ basis
    mu = np.array(
        [getattr(a, "eigenvalue", reduced[0, 0]), getattr(b, "eigenvalue", reduced[1, 1])]
    )
    return float(
        max(
            np.max(np.abs(gram - np.eye(2))),
            np.max(np.abs(reduced - np.diag(mu))) / max(1.0, np.max(np.abs(mu))),
        )
    )
