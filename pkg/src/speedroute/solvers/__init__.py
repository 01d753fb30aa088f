"""Brute-force oracle and metaheuristics over orders of the required events."""

from .aco import solve_aco
from .brute import BruteForceResult, brute_force
from .decode import Decoder
from .ga import SolveResult, evolve_permutations, log_to_csv, solve_ga
from .operators import permutation_items, precedence, repair, respects
from .pareto import ParetoFront, brute_force_pareto, dominates, nondominated, solve_pareto
from .params import ACOParams, MOParams, SolverParams

__all__ = [
    "ACOParams",
    "BruteForceResult",
    "Decoder",
    "MOParams",
    "ParetoFront",
    "SolveResult",
    "SolverParams",
    "brute_force",
    "brute_force_pareto",
    "dominates",
    "evolve_permutations",
    "log_to_csv",
    "nondominated",
    "permutation_items",
    "precedence",
    "repair",
    "respects",
    "solve_aco",
    "solve_ga",
    "solve_pareto",
]
