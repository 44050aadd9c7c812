"""Fast end-to-end checks of elementary identities of the package."""

import logging

import numpy as np
import pandas as pd

from .bands import bloch_gap
from .config import parse_config
from .crossings import classify_crossing
from .diagnostics import overlap, petermann
from .exceptions import ConfigError
from .lattice import (
    GridSpec,
    LatticeParams,
    build_hamiltonian,
    cap_profile,
    kinetic_matrix,
    potential_value,
)
from .loops import LoopSpec, run_loop
from .solvers import NonlinearSolver, ResonanceSolver
from .stats import fit_landau_zener
from .utils import TWO_PI

LOGGER = logging.getLogger(__name__)

SMALL_GRID = GridSpec(periods_left=6, periods_right=4, points_per_period=32)


def _close(value, expected, atol=1e-12):
    return bool(np.allclose(value, expected, atol=atol)), f"got {value!r}, expected {expected!r}"


def _potential_at_origin():
    return _close(potential_value(0.0, LatticeParams(delta=1.0, phi=0.0)), 1.0)


def _monochromatic_potential():
    x = np.linspace(-5, 5, 11)
    return _close(potential_value(x, LatticeParams(delta=0.0)), 0.5 * np.cos(x))


def _potential_periodicity():
    p = LatticeParams(delta=1.3, phi=0.7)
    x = np.linspace(-7, 7, 15)
    return _close(potential_value(x + TWO_PI, p), potential_value(x, p), atol=1e-12)


def _cap_profile_values():
    g = SMALL_GRID
    values = cap_profile([g.x_cap + 0.1, g.x_cap - g.cap_length, g.x_cap - 0.5 * g.cap_length], g)
    return _close(values, [0.0, 1.0, 0.25])


def _hermitian_limit_is_real():
    H = build_hamiltonian(LatticeParams(), SMALL_GRID.replace(cap_strength=0.0))
    return H.is_real and H.symmetric, f"is_real={H.is_real}, symmetric={H.symmetric}"


def _hamiltonian_symmetric():
    H = build_hamiltonian(LatticeParams(delta=0.4, phi=-1.0, F=0.3), SMALL_GRID)
    return bool(np.array_equal(H.entries, H.entries.T)), f"symmetric={H.symmetric}"


def _three_point_stencil():
    grid = GridSpec(periods_left=1, periods_right=1, points_per_period=4, kinetic="fd")
    T = kinetic_matrix(grid.replace(stencil_points=3))
    ok = np.isclose(T[0, 0], 1 / grid.dx**2) and np.isclose(T[0, 1], -0.5 / grid.dx**2)
    return bool(ok), f"diagonal={T[0, 0]:.6g}, off-diagonal={T[0, 1]:.6g}"


def _overlap_identities():
    rng = np.random.default_rng(0)
    a = rng.normal(size=8) + 1j * rng.normal(size=8)
    b = np.zeros(8, dtype=complex)
    b[:4], a[:4] = 1.0, 0.0
    return _close([overlap(a, a), overlap(a, b)], [1.0, 0.0])


def _petermann_bounds():
    rng = np.random.default_rng(1)
    real = rng.normal(size=16)
    complex_ = rng.normal(size=16) + 1j * rng.normal(size=16)
    ok = np.isclose(petermann(real), 1.0) and petermann(complex_) >= 1.0
    return bool(ok), f"K(real)={petermann(real):.6g}, K(complex)={petermann(complex_):.6g}"


def _landau_zener_recovery():
    F = np.linspace(0.1, 0.5, 9)
    gamma = 0.3 * F * np.exp(-2.0 / F)
    fit = fit_landau_zener(np.column_stack([F, gamma]))
    return _close(fit.slope, -2.0, atol=1e-6)


def _free_particle_gap():
    return _close(bloch_gap(LatticeParams(V0=1e-9, F=0.0), n_q=9), 0.0, atol=1e-6)


def _monochromatic_ladder():
    p = LatticeParams(delta=0.0, F=0.2)
    spectrum = ResonanceSolver(SMALL_GRID).solve(p).summary()
    members = sorted(spectrum.ladder(1), key=lambda r: r.site_index)
    pairs = [(a, b) for a, b in zip(members[:-1], members[1:]) if b.site_index == a.site_index + 1]
    if not pairs:
        return False, "no adjacent ladder members found"
    a, b = min(pairs, key=lambda ab: abs(ab[0].site_index) + abs(ab[1].site_index))
    shift = (b.eigenvalue - a.eigenvalue).real
    return bool(abs(shift - TWO_PI * p.F) < 1e-4), f"shift={shift:.10g}"


def _linear_limit_of_nonlinear():
    p = LatticeParams(delta=1.0, phi=-2.0, F=0.25)
    solver = NonlinearSolver(SMALL_GRID)
    seed = solver.seed_pair(p)[0]
    state = solver.solve(p, seed=seed).summary()
    ok = state.iterations == 1 and abs(state.mu - seed.eigenvalue) < 1e-9
    return bool(ok), f"iterations={state.iterations}, |dmu|={abs(state.mu - seed.eigenvalue):.2e}"


def _crossing_label_symmetry():
    F = np.linspace(0.2, 0.3, 21)
    mu1 = (F - 0.25) - 0.01j
    mu2 = -(F - 0.25) - 0.05j
    a = classify_crossing(F, mu1, mu2)
    b = classify_crossing(F, mu2, mu1)
    return a.type == b.type, f"{a.type} vs {b.type}"


def _distant_loop_has_no_swap():
    center = LatticeParams.from_inverse_field(5.0, delta=0.3, phi=0.0)
    trace = run_loop(LoopSpec(center, radius=0.05, steps=32), ResonanceSolver(SMALL_GRID))
    return trace.permutation == "identity", f"permutation={trace.permutation}"


def _config_defaults():
    return parse_config("") == parse_config("# defaults only\n"), "empty text gives defaults"


def _config_single_key():
    config = parse_config("lattice.delta = 1.5")
    ok = config.lattice.delta == 1.5 and config.grid == GridSpec()
    return ok, f"delta={config.lattice.delta}"


def _config_range_error():
    try:
        parse_config("grid.points_per_period = -4")
    except ConfigError as exc:
        return "grid.points_per_period" in str(exc), str(exc)
    return False, "no error raised"


CHECKS = (
    ("potential at origin", _potential_at_origin),
    ("monochromatic potential", _monochromatic_potential),
    ("potential periodicity", _potential_periodicity),
    ("cap profile values", _cap_profile_values),
    ("hermitian limit is real", _hermitian_limit_is_real),
    ("hamiltonian symmetric", _hamiltonian_symmetric),
    ("three-point stencil", _three_point_stencil),
    ("overlap identities", _overlap_identities),
    ("petermann bounds", _petermann_bounds),
    ("landau-zener recovery", _landau_zener_recovery),
    ("free-particle gap", _free_particle_gap),
    ("monochromatic ladder spacing", _monochromatic_ladder),
    ("nonlinear solver at g = 0", _linear_limit_of_nonlinear),
    ("crossing label symmetry", _crossing_label_symmetry),
    ("distant loop has no swap", _distant_loop_has_no_swap),
    ("config defaults", _config_defaults),
    ("config single key", _config_single_key),
    ("config range error", _config_range_error),
)


def run_selftest(checks=None):
    """Run the elementary checks.

    Parameters
    ----------
    checks : None or :obj:`list` of :obj:`str`, optional
        Names of the checks to run. Default = all.

    Returns
    -------
    df : :obj:`pandas.DataFrame`
        Columns ``check``, ``passed`` and ``detail``.
    """
    rows = []
    for name, func in CHECKS:
        if checks is not None and name not in checks:
            continue
        try:
            passed, detail = func()
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        LOGGER.info("%s: %s (%s)", name, "ok" if passed else "FAILED", detail)
        rows.append({"check": name, "passed": bool(passed), "detail": detail})
    return pd.DataFrame(rows, columns=["check", "passed", "detail"])
