"""PyWSEP: Python Wannier-Stark Exceptional-Point Engine."""

__version__ = "0.1.0"

from .core import (
    lz_samples,
    petermann_scan,
    solve_nonlinear_resonance,
    solve_resonances,
    tracked_pairs,
)
from .lattice import GridSpec, LatticeParams, build_hamiltonian
from .loops import LoopSpec, classify_loop_family, run_loop
from .search import find_ep, gap_objective, scan_gap_plane, seed_robustness, trace_ep_curve
from .solvers import NonlinearSolver, ResonanceSolver

__all__ = [
    "GridSpec",
    "LatticeParams",
    "LoopSpec",
    "NonlinearSolver",
    "ResonanceSolver",
    "build_hamiltonian",
    "classify_loop_family",
    "find_ep",
    "gap_objective",
    "lz_samples",
    "petermann_scan",
    "run_loop",
    "scan_gap_plane",
    "seed_robustness",
    "solve_nonlinear_resonance",
    "solve_resonances",
    "trace_ep_curve",
    "tracked_pairs",
]
