"""Many-objective optimization by corner solution search.

The optimizer alternates exploitative search around corner solutions of the
current nondominated set with SBX/polynomial-mutation exploration, and keeps
N survivors by dominance, nadir-box space division and maximin angles.
"""

from maoeacs.core import (
    EvaluationError,
    InvalidInputError,
    Population,
    ProblemDefinition,
    Solution,
    derive_seed,
    dominates,
    nondominated_filter,
    nondominated_sort,
    rng_stream,
)
from maoeacs.corner import corner_axis_set, corner_min_set, corner_search, estimate_nadir
from maoeacs.metrics import hv_exact, hv_monte_carlo, hypervolume, igd
from maoeacs.optimizer import AlgorithmConfig, RunResult, run
from maoeacs.problems import ProblemSpec, make_problem, true_pf_sample
from maoeacs.selection import dsa_select

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "EvaluationError",
    "InvalidInputError",
    "Population",
    "ProblemDefinition",
    "ProblemSpec",
    "RunResult",
    "Solution",
    "corner_axis_set",
    "corner_min_set",
    "corner_search",
    "derive_seed",
    "dominates",
    "dsa_select",
    "estimate_nadir",
    "hv_exact",
    "hv_monte_carlo",
    "hypervolume",
    "igd",
    "make_problem",
    "nondominated_filter",
    "nondominated_sort",
    "rng_stream",
    "run",
    "true_pf_sample",
]
