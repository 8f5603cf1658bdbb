"""Exact piecewise-affine solutions of the 2-D eikonal system |du/dx_i| = 1."""

from .numeric import Q2, format_q2, parse_q2, q2_compare
from .geometry import HDomain, GeneralDomain, build_hdomain, diamond, rect, unit_square, l1_distance, inner_approx
from .solution import PLSolution, validate, validate_grid, jump_sets, functional_F, integral, slicing_count
from .distance import distance_solution, partition_solution
from .oracle import GridSpec, enumerate_grid_solutions, min_F_grid, oracle_1d, relaxation_lower_bound
from .weight import WeightH, build_weight, h_eval, shell_solution, functional_Fh
from .optimizer import minimize_F, minimize_Fh, lexicographic_select
from .kernels import BACKEND

__all__ = [
    "Q2", "format_q2", "parse_q2", "q2_compare",
    "HDomain", "GeneralDomain", "build_hdomain", "diamond", "rect", "unit_square", "l1_distance", "inner_approx",
    "PLSolution", "validate", "validate_grid", "jump_sets", "functional_F", "integral", "slicing_count",
    "distance_solution", "partition_solution",
    "GridSpec", "enumerate_grid_solutions", "min_F_grid", "oracle_1d", "relaxation_lower_bound",
    "WeightH", "build_weight", "h_eval", "shell_solution", "functional_Fh",
    "minimize_F", "minimize_Fh", "lexicographic_select", "BACKEND",
]
