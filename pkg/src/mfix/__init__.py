"""Fixed points of systems of coordinate-wise monotone operators.

Every such system ``x_i = T_i(x_1, ..., x_N)`` is rewritten through a mixed
monotone operator ``A`` with ``A(x, x) = T(x)`` and solved by the coupled
iteration ``(u, v) -> (A(u, v), A(v, u))``.
"""

__version__ = "0.1.0"

from .core import (
    ComparisonFunction,
    Direction,
    MetricProfile,
    MonotoneSignature,
    PartiallyMonotoneSystem,
    ProductPoint,
    phi_iterate,
    point,
    product_leq,
    product_metric,
)
from .errors import ConfigError, MfixError, NumericalError, StructuralError, ValidationError
from .sigma import (
    MixedMonotoneOperator,
    build_mixed_operator,
    preceq,
    projection,
    s_compose,
    s_power,
    sigma_apply,
)
from .solver import (
    CoupledIterationState,
    FixedPointResult,
    SolveConfig,
    coupled_step,
    solve,
    solve_from_single_start,
)
from .verify import (
    ContractionReport,
    ReducibilityVerdict,
    classify_reducibility,
    count_reducible,
    verify_contraction,
    verify_coupled_bounds,
)
from .applications import (
    CoupledLowerUpperSolution,
    PBVSProblem,
    TripledProblem,
    green_kernel,
    pbvs_operator,
    solve_pbvs,
    tripled_to_system,
    verify_lower_upper,
)
