"""Sharp pointwise bounds on the distribution of X + Y and X - Y for fixed marginals.

Distributions are exact piecewise-linear CDFs with jumps (:class:`CdfCurve`).
Bounds are computed in rational arithmetic by scanning breakpoints, then
checked against the extremal couplings that attain them and, for discrete
marginals, against a linear-programming oracle over all couplings.
"""

from .bounds import (
    BoundReport,
    diff_bounds,
    rho_w,
    rho_w_left,
    sum_bounds,
    sweep_grid,
    tau_w,
    tau_w_left,
    wd_diff_lower,
    wd_diff_upper,
)
from .copula import (
    AchievabilityReport,
    ConsistencyError,
    ExtremalCopula,
    achievability,
    eval_copula,
    exact_prob,
    sample,
)
from .dist import (
    CdfCurve,
    Knot,
    SpecError,
    discretize_family,
    dump_spec,
    from_atoms,
    load_spec,
    parse_spec,
    point_mass,
    uniform,
)
from .ite import ArmPair, frechet_cell_bounds, ite_bounds, ite_bounds_historical
from .oracle import CouplingLP, CouplingSolution, InfeasibleMarginals, coupling_lp, enumerate_tiny, solve_lp

__all__ = [
    "AchievabilityReport", "ArmPair", "BoundReport", "CdfCurve", "ConsistencyError",
    "CouplingLP", "CouplingSolution", "ExtremalCopula", "InfeasibleMarginals", "Knot",
    "SpecError", "achievability", "coupling_lp", "diff_bounds", "discretize_family",
    "dump_spec", "enumerate_tiny", "eval_copula", "exact_prob", "frechet_cell_bounds",
    "from_atoms", "ite_bounds", "ite_bounds_historical", "load_spec", "parse_spec",
    "point_mass", "rho_w", "rho_w_left", "sample", "solve_lp", "sum_bounds", "sweep_grid",
    "tau_w", "tau_w_left", "uniform", "wd_diff_lower", "wd_diff_upper",
]
