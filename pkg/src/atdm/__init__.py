"""Transform-decomposition solver for fractional coupled thermoelastic systems."""

from .specfun import LinExp, gamma_ratio, mittag_leffler
from .fracseries import Series, Term, collect, diff_t, diff_x, equal_numeric
from .fracops import FracOrder, aboodh, aboodh_inverse, caputo, rl_integral
from .adomian import DerivFactor, NonlinearitySpec, adomian_oracle, adomian_poly
from .engine import LinearTermSpec, ProblemSpec, ComponentSolution, solve
from .benchmarks import BENCHMARKS, get_benchmark
from .specio import load_problem

__all__ = [
    "LinExp", "gamma_ratio", "mittag_leffler",
    "Series", "Term", "collect", "diff_t", "diff_x", "equal_numeric",
    "FracOrder", "aboodh", "aboodh_inverse", "caputo", "rl_integral",
    "DerivFactor", "NonlinearitySpec", "adomian_oracle", "adomian_poly",
    "LinearTermSpec", "ProblemSpec", "ComponentSolution", "solve",
    "BENCHMARKS", "get_benchmark", "load_problem",
]
