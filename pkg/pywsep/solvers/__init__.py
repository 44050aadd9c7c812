"""Solvers for linear and nonlinear Wannier-Stark resonances."""

from .linear import ResonanceSolver, label_ladders, physical_states, select_cap_strength
from .nonlinear import NonlinearSolver, nonlinear_petermann_scan, solve_nonlinear

__all__ = [
    "ResonanceSolver",
    "NonlinearSolver",
    "label_ladders",
    "physical_states",
    "select_cap_strength",
    "solve_nonlinear",
    "nonlinear_petermann_scan",
]
