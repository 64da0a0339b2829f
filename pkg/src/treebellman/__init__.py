"""Sharp Bellman function of the dyadic/tree maximal operator.

Closed-form values B(p, f, F, k), explicit extremal functions, and
independent numerical verification (quadrature, randomized supremum
probing, a concrete dyadic model).
"""

from .bellman import (
    BellmanReport,
    FeasibleInterval,
    GridMax,
    Params,
    bellman_value,
    feasible_interval,
    hk_eval,
    rk_eval,
    rk_grid_max,
    solve_b0,
)
from .errors import (
    AccuracyError,
    BracketError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    SamplingError,
    TreeBellmanError,
)
from .extremizer import (
    ExtremalFunction,
    build_extremizer,
    continuity_gap,
    from_record,
    g_eval,
    hardy_average,
    hardy_functional_closed,
    moments,
    to_record,
)
from .scalar_kernels import (
    DEFAULT_ROOT_CONFIG,
    RootConfig,
    hp_eval,
    omega_p,
    omega_pk,
    sigma_eval,
)
from .verification import (
    ProbeReport,
    StepFunction,
    best_k_set_integral,
    check_weak_type,
    discrete_hardy,
    discretize_extremizer,
    dyadic_maximal,
    graded_quadrature,
    probe_supremum,
    quadrature_hardy,
    sample_admissible,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BellmanReport",
    "BracketError",
    "ConsistencyError",
    "ConvergenceError",
    "DEFAULT_ROOT_CONFIG",
    "DomainError",
    "ExtremalFunction",
    "FeasibleInterval",
    "GridMax",
    "InfeasibleError",
    "Params",
    "ProbeReport",
    "RootConfig",
    "SamplingError",
    "StepFunction",
    "TreeBellmanError",
    "bellman_value",
    "best_k_set_integral",
    "build_extremizer",
    "check_weak_type",
    "continuity_gap",
    "discrete_hardy",
    "discretize_extremizer",
    "dyadic_maximal",
    "feasible_interval",
    "from_record",
    "g_eval",
    "graded_quadrature",
    "hardy_average",
    "hardy_functional_closed",
    "hk_eval",
    "hp_eval",
    "moments",
    "omega_p",
    "omega_pk",
    "probe_supremum",
    "quadrature_hardy",
    "rk_eval",
    "rk_grid_max",
    "sample_admissible",
    "sigma_eval",
    "solve_b0",
    "to_record",
]
